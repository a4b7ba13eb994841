//! Order-by-order perturbation theory in the ladder-operator representation.
//!
//! With Z₋(z) = ±Z₊(−z−b) the coupled pair of oscillator equations collapses
//! to a single differential–difference equation for the function f with
//! Z₊ ↔ f(a†)|0⟩:
//!
//! ```text
//! x f'(x) + f(x)/2 ± ε e^{−b²/4} e^{−cx} f(−x−c) = E f(x),    c = b/√2
//! ```
//!
//! Expanding f and E in powers of ε gives, at order k ≥ 1,
//!
//! ```text
//! x f_k' − n f_k = S_k(x) + E_k xⁿ/√n!
//! S_k(x) = −e^{−b²/4} e^{−cx} f_{k−1}(−x−c) + Σ_{m=1}^{k−1} E_{k−m} f_m(x)
//! ```
//!
//! The xⁿ coefficient of f_k is pinned to zero (intermediate normalization),
//! which fixes E_k; every other coefficient follows from a division by m − n.
//! Only the symmetric series are stored: the antisymmetric branch is the same
//! solution evaluated at −ε.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::params::ValidConfig;
use crate::series::TruncatedSeries;
use crate::sho::fill_hermite_functions;
use crate::spin::SpinorProfile;

/// Relative tolerance between the two routes to E_n^(k).
pub const ENERGY_CROSS_CHECK_TOL: f64 = 1e-10;
/// Largest Fock amplitude allowed in the top stored degrees of a solved series.
pub const TAIL_TOL: f64 = 1e-12;
const TAIL_WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Z₋(z) = +Z₊(−z−b); spin roughly along the field.
    Symmetric,
    /// Z₋(z) = −Z₊(−z−b); spin roughly against the field.
    Antisymmetric,
}

impl Branch {
    /// Factor multiplying ε when the stored symmetric series are evaluated.
    pub fn epsilon_sign(self) -> f64 {
        match self {
            Branch::Symmetric => 1.0,
            Branch::Antisymmetric => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Symmetric => "symmetric",
            Branch::Antisymmetric => "antisymmetric",
        }
    }
}

/// Energies E_n^(k) and series f_n^(k) for one unperturbed level n.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSolution {
    level: usize,
    b: f64,
    branch: Branch,
    energies: Vec<f64>,
    series: Vec<TruncatedSeries>,
}

impl PerturbationSolution {
    /// Order-zero data: E = n + 1/2, f = xⁿ/√n!.
    pub fn unperturbed(level: usize, b: f64, degree: usize, branch: Branch) -> Result<Self> {
        if level > degree {
            return Err(Error::InvalidArgument(format!(
                "level {level} does not fit in series degree {degree}"
            )));
        }
        let inv_sqrt_fact = (1..=level).fold(1.0, |acc, j| acc / (j as f64).sqrt());
        Ok(Self {
            level,
            b,
            branch,
            energies: vec![level as f64 + 0.5],
            series: vec![TruncatedSeries::monomial(level, inv_sqrt_fact, degree)],
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// Highest order present.
    pub fn order(&self) -> usize {
        self.energies.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.series[0].degree()
    }

    /// Symmetric-branch coefficients E_n^(0) … E_n^(K).
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn series(&self, k: usize) -> &TruncatedSeries {
        &self.series[k]
    }

    /// Same stored series, relabelled for the other branch.
    pub fn with_branch(&self, branch: Branch) -> Self {
        Self {
            branch,
            ..self.clone()
        }
    }

    /// Σ_k (±ε)^k E_n^(k) for this solution's branch.
    pub fn total_energy(&self, epsilon: f64) -> f64 {
        let e = self.branch.epsilon_sign() * epsilon;
        self.energies.iter().rev().fold(0.0, |acc, &ek| acc * e + ek)
    }

    fn push(&mut self, energy: f64, series: TruncatedSeries) {
        self.energies.push(energy);
        self.series.push(series);
    }

    /// Wavefunction of a single order, Z^(k)(z) = Σ_m a_m √(m!) ψ_m(z), with the
    /// oscillator centred at the origin and no overall normalization.
    pub fn order_profile(&self, k: usize, z: &[f64]) -> Vec<f64> {
        synthesize_amplitudes(&self.series[k].fock_amplitudes(), z)
    }

    /// Largest Fock amplitude among the top stored degrees over all orders.
    pub fn tail_amplitude(&self) -> f64 {
        self.series[1..]
            .iter()
            .map(|s| s.tail_amplitude(TAIL_WINDOW))
            .fold(0.0, f64::max)
    }
}

/// Computes E_n^(k) and f_n^(k) from orders 0 … k−1.
pub fn recursion_step(prior: &PerturbationSolution, k: usize) -> Result<(f64, TruncatedSeries)> {
    if k == 0 {
        return Err(Error::InvalidArgument("recursion starts at order 1".into()));
    }
    if prior.order() + 1 != k {
        return Err(Error::InvalidArgument(format!(
            "order {k} requested but orders 0..={} are present",
            prior.order()
        )));
    }
    let n = prior.level;
    let degree = prior.degree();
    let c = prior.b / SQRT_2;
    let overlap = (-0.25 * prior.b * prior.b).exp();
    let previous = &prior.series[k - 1];

    let shifted = TruncatedSeries::exp_linear(-c, degree).multiply(&previous.reflect_shift(c));
    let mut rhs = shifted.scale(-overlap);
    for m in 1..k {
        rhs.add_scaled(prior.energies[k - m], &prior.series[m]);
    }

    let sqrt_fact = (1..=n).fold(1.0, |acc, j| acc * (j as f64).sqrt());
    let energy = -sqrt_fact * rhs.coeff(n);
    let closed = energy_closed_sum(n, overlap, c, previous);
    if (energy - closed).abs() > ENERGY_CROSS_CHECK_TOL * energy.abs().max(1.0) {
        return Err(Error::CrossCheck {
            what: "E_n^(k) coefficient extraction vs binomial sum",
            lhs: energy,
            rhs: closed,
        });
    }

    let mut next = TruncatedSeries::zero(degree);
    for (m, &r) in rhs.coeffs().iter().enumerate() {
        if m != n {
            next.set_coeff(m, r / (m as f64 - n as f64));
        }
    }
    debug_assert_eq!(next.coeff(n), 0.0);
    Ok((energy, next))
}

/// E_n^(k) = e^{−b²/4}/√n! · Σ_r C(n,r) (−c)^{n−r} [∂_x^r g(−x−c)]_{x=0},
/// with g = f_n^(k−1). The r-th derivative of the reflected function equals
/// (−1)^r g^{(r)}(−c).
fn energy_closed_sum(n: usize, overlap: f64, c: f64, previous: &TruncatedSeries) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for r in 0..=n {
        if r > 0 {
            binom *= (n - r + 1) as f64 / r as f64;
        }
        let reflect = if r % 2 == 0 { 1.0 } else { -1.0 };
        sum += binom * (-c).powi((n - r) as i32) * reflect * previous.derivative_at(r, -c);
    }
    let sqrt_fact = (1..=n).fold(1.0, |acc, j| acc * (j as f64).sqrt());
    overlap * sum / sqrt_fact
}

/// Solves level `n` through order `order` and checks the truncation tail.
pub fn solve_perturbation(
    n: usize,
    order: usize,
    branch: Branch,
    config: &ValidConfig,
) -> Result<PerturbationSolution> {
    let sol = solve_unchecked(n, order, branch, config.b, config.series_degree)?;
    let tail = sol.tail_amplitude();
    if tail > TAIL_TOL {
        return Err(Error::Truncation {
            what: "perturbation series (raise series_degree)",
            tail,
            tolerance: TAIL_TOL,
        });
    }
    Ok(sol)
}

/// Same as [`solve_perturbation`] without the tail check.
pub fn solve_unchecked(
    n: usize,
    order: usize,
    branch: Branch,
    b: f64,
    degree: usize,
) -> Result<PerturbationSolution> {
    let mut sol = PerturbationSolution::unperturbed(n, b, degree, branch)?;
    for k in 1..=order {
        let (energy, series) = recursion_step(&sol, k)?;
        sol.push(energy, series);
    }
    Ok(sol)
}

fn synthesize_amplitudes(amplitudes: &[f64], z: &[f64]) -> Vec<f64> {
    let mut psi = vec![0.0; amplitudes.len()];
    z.iter()
        .map(|&zi| {
            fill_hermite_functions(zi, &mut psi);
            amplitudes.iter().zip(&psi).map(|(a, p)| a * p).sum()
        })
        .collect()
}

/// Assembles the normalized spinor for angular mode ℓ = 0.
pub fn synthesize_wavefunction(sol: &PerturbationSolution, epsilon: f64, z: &[f64]) -> SpinorProfile {
    synthesize_wavefunction_for_ell(sol, epsilon, 0, z)
}

/// Assembles Z₊ and Z₋ on `z`, translated to the well pair at −ℓb, −(ℓ+1)b.
///
/// Z₊ = σ Σ_k (σε)^k Z^(k) with σ = +1 (symmetric) or −1 (antisymmetric),
/// and Z₋(z) = σ Z₊(−z−b). The pair is scaled to unit norm using the exact
/// Fock-space norm, which both components share.
pub fn synthesize_wavefunction_for_ell(
    sol: &PerturbationSolution,
    epsilon: f64,
    ell: i32,
    z: &[f64],
) -> SpinorProfile {
    let sigma = sol.branch.epsilon_sign();
    let e = sigma * epsilon;
    let degree = sol.degree();

    let mut combined = TruncatedSeries::zero(degree);
    let mut power = 1.0;
    let mut order_norms = Vec::with_capacity(sol.series.len());
    for f in &sol.series {
        combined.add_scaled(sigma * power, f);
        order_norms.push(power.abs() * f.fock_norm());
        power *= e;
    }
    let convergence_ratio = order_norms
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    if let Some(ratio) = convergence_ratio {
        if ratio >= 1.0 {
            log::warn!(
                "perturbation series in epsilon={epsilon} does not decrease (max order ratio {ratio:.3})"
            );
        }
    }

    let amplitudes = combined.fock_amplitudes();
    let norm_sq: f64 = 2.0 * amplitudes.iter().map(|a| a * a).sum::<f64>();
    let scale = 1.0 / norm_sq.sqrt();
    let amplitudes: Vec<f64> = amplitudes.iter().map(|a| a * scale).collect();

    let b = sol.b;
    let shift = ell as f64 * b;
    let plus_points: Vec<f64> = z.iter().map(|&zi| zi + shift).collect();
    let minus_points: Vec<f64> = plus_points.iter().map(|&w| -w - b).collect();
    let z_plus = synthesize_amplitudes(&amplitudes, &plus_points);
    let z_minus = synthesize_amplitudes(&amplitudes, &minus_points)
        .into_iter()
        .map(|v| sigma * v)
        .collect();

    SpinorProfile {
        z: z.to_vec(),
        z_plus,
        z_minus,
        ell,
        b,
        level: sol.level,
        epsilon,
        energy: sol.total_energy(epsilon),
        branch: sol.branch,
        convergence_ratio,
    }
}
