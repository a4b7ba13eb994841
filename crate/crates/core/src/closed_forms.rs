//! Closed forms of the low-order corrections, evaluated by direct quadrature.
//! They share nothing with the series recursion and serve as its check.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;
use crate::sho::{overlap_row0, PI_M4};

/// Arguments of [`ein`] must stay below this in magnitude.
pub const EIN_LIMIT: f64 = 700.0;

/// Agreement required between a quadrature and its node-doubled rerun.
pub const QUADRATURE_TOL: f64 = 1e-8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Gauss–Legendre rule mapped to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 1.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// Tensor-product rule on the unit square.
    pub fn integrate_2d(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, wx)| wx * self.integrate(|y| f(*x, y)))
            .sum()
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Ein(y) = ∫₀¹ (1 − e^{−ys})/s ds = Σ_{j≥1} (−1)^{j+1} y^j/(j·j!).
///
/// The series is used for y ≤ 4 (no cancellation for negative y); above that
/// Ein(y) = γ + ln y + E₁(y) with E₁ from its continued fraction.
pub fn ein(y: f64) -> Result<f64> {
    if !(y.abs() < EIN_LIMIT) {
        return Err(Error::OverflowGuard { value: y, limit: EIN_LIMIT });
    }
    if y <= 4.0 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 1..10_000 {
            let jf = j as f64;
            term *= -y / jf;
            let add = -term / jf;
            sum += add;
            if add.abs() <= f64::EPSILON * 0.25 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(EULER_GAMMA + y.ln() + exp_integral_e1(y))
    }
}

/// E₁(y) for y > 1 by the modified Lentz continued fraction.
fn exp_integral_e1(y: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-y).exp()
}

/// (E⁽⁰⁾, E⁽¹⁾, E⁽²⁾) of the symmetric ground state:
/// 1/2, e^{−b²/4}, and e^{−b²/2}∫₀¹(1 − e^{b²s/2})/s ds = e^{−b²/2}·Ein(−b²/2).
pub fn energy_corrections_closed(b: f64) -> Result<(f64, f64, f64)> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("b must be positive (got {b})")));
    }
    let e2 = (-0.5 * b * b).exp() * ein(-0.5 * b * b)?;
    Ok((0.5, (-0.25 * b * b).exp(), e2))
}

/// Exponent of the displaced Gaussian ratio:
/// e^{b²w²/4} e^{−(z+bw)²/2} = e^{−z²/2} e^{g(w)}, g(w) = −bzw − b²w²/4.
fn gaussian_shift(b: f64, z: f64, w: f64) -> f64 {
    -b * z * w - 0.25 * b * b * w * w
}

/// (e^x − 1)/x, continuous at 0.
fn expm1_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

/// Integrand of the first-order correction with e^{−z²/2} and constants
/// stripped: (1 − e^{g(s)})/s. Its s → 0 limit is b·z.
pub fn first_order_integrand(b: f64, z: f64, s: f64) -> f64 {
    (b * z + 0.25 * b * b * s) * expm1_ratio(gaussian_shift(b, z, s))
}

/// Second-order integrand without prefactors. The brace
/// (2 − e^{b²s₁/2}) − e^{g(s₂)} + e^{b²s₁/2}e^{g(s₂(1−s₁))} − e^{g(s₁s₂)}
/// is regrouped as
/// −(e^{g(s₁s₂)} − 1) + e^{g(s₂)}(e^{g(s₂(1−s₁)) − g(s₂)} − 1) + (e^{b²s₁/2} − 1)(e^{g(s₂(1−s₁))} − 1),
/// each piece a multiple of s₁s₂ whose quotient is formed without cancellation.
pub fn second_order_integrand(b: f64, z: f64, s1: f64, s2: f64) -> f64 {
    let bz = b * z;
    let bb = b * b;
    let first = (bz + 0.25 * bb * s1 * s2) * expm1_ratio(gaussian_shift(b, z, s1 * s2));
    let dg_over = bz + 0.25 * bb * s2 * (2.0 - s1);
    let second = gaussian_shift(b, z, s2).exp() * dg_over * expm1_ratio(s1 * s2 * dg_over);
    let w = s2 * (1.0 - s1);
    let g3_over = -(1.0 - s1) * (bz + 0.25 * bb * w);
    let third = 0.5 * bb * expm1_ratio(0.5 * bb * s1) * g3_over * expm1_ratio(gaussian_shift(b, z, w));
    first + second + third
}

fn zplus_once(order: u8, b: f64, z: &[f64], rule: &QuadratureRule) -> Vec<f64> {
    let n0 = PI_M4;
    z.par_iter()
        .map(|&zi| {
            let gauss = (-0.5 * zi * zi).exp();
            match order {
                1 => n0 * (-0.25 * b * b).exp() * gauss * rule.integrate(|s| first_order_integrand(b, zi, s)),
                _ => {
                    n0 * (-0.5 * b * b).exp()
                        * gauss
                        * rule.integrate_2d(|s1, s2| second_order_integrand(b, zi, s1, s2))
                }
            }
        })
        .collect()
}

/// Z₊⁽¹⁾ or Z₊⁽²⁾ of the symmetric ground state on `z`, unnormalized (the
/// zeroth order is N₀e^{−z²/2}). The quadrature is repeated with twice the
/// nodes; a disagreement above [`QUADRATURE_TOL`] is an error.
pub fn zplus_correction(order: u8, b: f64, z: &[f64], quad_nodes: usize) -> Result<Vec<f64>> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "closed forms exist for orders 1 and 2 only (got {order})"
        )));
    }
    let coarse = zplus_once(order, b, z, &QuadratureRule::gauss_legendre(quad_nodes));
    let fine = zplus_once(order, b, z, &QuadratureRule::gauss_legendre(2 * quad_nodes));
    let deviation = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if deviation > QUADRATURE_TOL {
        return Err(Error::QuadratureNotConverged {
            what: "closed-form wavefunction correction",
            deviation,
        });
    }
    Ok(fine)
}

/// First-order correction as a sum over excited oscillator states,
/// Σ_{k=1}^{k_max} |k⟩⟨k|V|0⟩/(E₀ − E_k), converted to power-series form
/// (the |k⟩ amplitude a_k becomes the coefficient a_k/√k! of x^k).
pub fn appendix_first_order(b: f64, k_max: usize) -> TruncatedSeries {
    let mut series = TruncatedSeries::zero(k_max);
    let mut sqrt_fact = 1.0;
    for k in 1..=k_max {
        sqrt_fact *= (k as f64).sqrt();
        let amplitude = -overlap_row0(k, b) / k as f64;
        series.set_coeff(k, amplitude / sqrt_fact);
    }
    series
}

/// Bound on the Fock-space norm of the terms beyond `k_max` in
/// [`appendix_first_order`], from the factorial decay of the amplitudes.
pub fn appendix_tail_bound(b: f64, k_max: usize) -> f64 {
    let c = b / 2f64.sqrt();
    let first = overlap_row0(k_max + 1, b).abs() / (k_max + 1) as f64;
    let ratio = c / ((k_max + 2) as f64).sqrt();
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        first / (1.0 - ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn legendre_rule_basics() {
        let rule = QuadratureRule::gauss_legendre(64);
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for p in [0, 5, 31, 127] {
            let got = rule.integrate(|x| x.powi(p));
            assert!((got - 1.0 / (p as f64 + 1.0)).abs() < 1e-12, "degree {p}");
        }
        let small = QuadratureRule::gauss_legendre(3);
        assert!((small.integrate(|x| x.powi(5)) - 1.0 / 6.0).abs() < 1e-15);
        assert!(small.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ein_values() {
        assert_eq!(ein(0.0).unwrap(), 0.0);
        let rule = QuadratureRule::gauss_legendre(64);
        for y in [1.0, -2.0, 0.3, 3.9, -10.0] {
            let quad = rule.integrate(|s| -(-y * s).exp_m1() / s);
            assert!((ein(y).unwrap() - quad).abs() < 1e-12 * quad.abs().max(1.0), "y={y}");
        }
    }

    #[test]
    fn ein_branches_join() {
        let below = ein(4.0).unwrap();
        let above = EULER_GAMMA + 4.0f64.ln() + exp_integral_e1(4.0);
        assert!((below - above).abs() < 1e-13);
        // large arguments against a fine composite quadrature
        let rule = QuadratureRule::gauss_legendre(200);
        for y in [6.0, 25.0] {
            let quad: f64 = (0..20)
                .map(|i| {
                    let (a, h) = (i as f64 / 20.0, 1.0 / 20.0);
                    h * rule.integrate(|u| {
                        let s = a + h * u;
                        -(-y * s).exp_m1() / s
                    })
                })
                .sum();
            assert!((ein(y).unwrap() - quad).abs() < 1e-12 * quad, "y={y}");
        }
    }

    #[test]
    fn ein_guard() {
        assert!(matches!(ein(700.0), Err(Error::OverflowGuard { .. })));
        assert!(matches!(ein(f64::NAN), Err(Error::OverflowGuard { .. })));
        let deep = ein(-699.0).unwrap();
        assert!(deep.is_finite() && deep < 0.0);
    }

    #[test]
    fn closed_energies() {
        let (e0, e1, e2) = energy_corrections_closed(2.0).unwrap();
        assert_eq!(e0, 0.5);
        assert!((e1 - (-1.0f64).exp()).abs() < 1e-16);
        assert!((e2 - -0.498_557_794_286_274_84).abs() < 1e-14);
        assert!(energy_corrections_closed(0.0).is_err());
    }

    #[test]
    fn removable_singularities() {
        for z in [-3.0, 0.4, 2.0] {
            let limit = first_order_integrand(2.0, z, 0.0);
            assert!((first_order_integrand(2.0, z, 1e-8) - limit).abs() < 1e-6);
            for s2 in [0.3, 0.9] {
                let edge = second_order_integrand(2.0, z, 0.0, s2);
                assert!((second_order_integrand(2.0, z, 1e-9, s2) - edge).abs() < 1e-6);
            }
            let corner = second_order_integrand(2.0, z, 0.0, 0.0);
            assert!((second_order_integrand(2.0, z, 1e-9, 1e-9) - corner).abs() < 1e-6);
            for s1 in [0.2, 0.7] {
                let edge = second_order_integrand(2.0, z, s1, 0.0);
                assert!((second_order_integrand(2.0, z, s1, 1e-9) - edge).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn second_order_regrouping_matches_the_literal_brace() {
        let (b, z) = (2.0, -0.7);
        for &(s1, s2) in &[(0.3, 0.8), (0.9, 0.5), (0.5, 0.05)] {
            let e = |w: f64| (b * b * w * w / 4.0).exp() * (-(z + b * w).powi(2) / 2.0).exp();
            let a = (b * b * s1 / 2.0).exp();
            let brace = (2.0 - a) * (-z * z / 2.0).exp() - e(s2) + a * e(s2 * (1.0 - s1)) - e(s1 * s2);
            let literal = brace / (s1 * s2) / (-z * z / 2.0).exp();
            assert!((second_order_integrand(b, z, s1, s2) - literal).abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_at_origin() {
        // z = 0, b = 2: N₀e^{−1}∫(1 − e^{−s²})/s ds = N₀e^{−1}·Ein(1)/2
        let got = zplus_correction(1, 2.0, &[0.0], 64).unwrap()[0];
        let want = PI_M4 * (-1.0f64).exp() * 0.5 * ein(1.0).unwrap();
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn strong_displacement_suppresses() {
        let z: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        for v in zplus_correction(1, 10.0, &z, 64).unwrap() {
            assert!(v.abs() < 1e-8);
        }
    }

    #[test]
    fn bad_order() {
        assert!(matches!(zplus_correction(3, 2.0, &[0.0], 16), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn node_doubling_agrees_at_defaults() {
        let z: Vec<f64> = (0..33).map(|i| -6.0 + 9.0 * i as f64 / 32.0).collect();
        for order in [1u8, 2] {
            let a = zplus_once(order, 2.0, &z, &QuadratureRule::gauss_legendre(64));
            let b = zplus_once(order, 2.0, &z, &QuadratureRule::gauss_legendre(128));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn appendix_coefficients() {
        let b = 2.0;
        let s = appendix_first_order(b, 1);
        assert_eq!(s.coeff(0), 0.0);
        assert!((s.coeff(1) - 2f64.sqrt() * (-1.0f64).exp()).abs() < 1e-15);
        // matches e^{−b²/4}·Ein(bx/√2) term by term
        let c = b / 2f64.sqrt();
        let full = appendix_first_order(b, 40);
        let mut pow_over_fact = 1.0;
        for k in 1..=40 {
            pow_over_fact *= c / k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let want = (-0.25 * b * b).exp() * sign * pow_over_fact / k as f64;
            assert!((full.coeff(k) - want).abs() <= 1e-13 * want.abs());
        }
        assert!(appendix_tail_bound(b, 40) < 1e-20);
    }

    proptest! {
        #[test]
        fn appendix_vanishes_with_b(b in 1e-6f64..1e-3) {
            let s = appendix_first_order(b, 10);
            for k in 1..=10 {
                prop_assert!(s.coeff(k).abs() <= b.powi(k as i32));
            }
        }

        #[test]
        fn ein_series_matches_quadrature(y in -30.0f64..30.0) {
            let rule = QuadratureRule::gauss_legendre(96);
            let quad = rule.integrate(|s| -(-y * s).exp_m1() / s);
            let v = ein(y).unwrap();
            prop_assert!((v - quad).abs() < 1e-10 * quad.abs().max(1.0));
        }
    }
}
