//! Spin-1/2 observables: spinor profiles, the spin-direction field, and the
//! two-state (Rabi) dynamics between the lowest symmetric and antisymmetric
//! levels.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::Result;
use crate::params::ValidConfig;
use crate::perturbation::{solve_perturbation, Branch, PerturbationSolution};
use crate::spinless::{ComplexField, FieldGrid};

/// Real spinor components sampled along z for one energy eigenstate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorProfile {
    pub z: Vec<f64>,
    pub z_plus: Vec<f64>,
    pub z_minus: Vec<f64>,
    pub ell: i32,
    pub b: f64,
    pub level: usize,
    pub epsilon: f64,
    pub energy: f64,
    pub branch: Branch,
    /// Largest ratio ‖ε^k f_k‖ / ‖ε^{k−1} f_{k−1}‖ across the stored orders.
    pub convergence_ratio: Option<f64>,
}

impl SpinorProfile {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// ρ = (Z₊² + Z₋²)^{1/2} at every sample.
    pub fn density(&self) -> Vec<f64> {
        self.z_plus
            .iter()
            .zip(&self.z_minus)
            .map(|(p, m)| p.hypot(*m))
            .collect()
    }

    /// Trapezoid estimate of ∫(Z₊² + Z₋²) dz over the samples.
    pub fn discrete_norm(&self) -> f64 {
        let dens: Vec<f64> = self
            .z_plus
            .iter()
            .zip(&self.z_minus)
            .map(|(p, m)| p * p + m * m)
            .collect();
        self.z
            .windows(2)
            .zip(dens.windows(2))
            .map(|(z, d)| 0.5 * (z[1] - z[0]) * (d[0] + d[1]))
            .sum()
    }

    /// Positions of the local maxima of ρ, refined by a parabola through the
    /// three samples around each discrete maximum.
    pub fn density_maxima(&self) -> Vec<f64> {
        let rho = self.density();
        let z = &self.z;
        let mut out = Vec::new();
        for i in 1..rho.len().saturating_sub(1) {
            if rho[i] > rho[i - 1] && rho[i] >= rho[i + 1] {
                out.push(parabola_vertex(
                    [z[i - 1], z[i], z[i + 1]],
                    [rho[i - 1], rho[i], rho[i + 1]],
                ));
            }
        }
        out
    }

    /// Distance between the outermost density maxima (zero for a single peak).
    pub fn maxima_separation(&self) -> f64 {
        let maxima = self.density_maxima();
        match (maxima.first(), maxima.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Sample positions where Z₊ changes sign.
    pub fn zplus_sign_changes(&self) -> Vec<f64> {
        self.z_plus
            .windows(2)
            .zip(self.z.windows(2))
            .filter(|(v, _)| v[0] * v[1] < 0.0)
            .map(|(v, z)| z[0] + (z[1] - z[0]) * v[0] / (v[0] - v[1]))
            .collect()
    }
}

fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let f01 = (y[1] - y[0]) / (x[1] - x[0]);
    let f12 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (f12 - f01) / (x[2] - x[0]);
    if a >= 0.0 {
        return x[1];
    }
    (0.5 * (x[0] + x[1]) - f01 / (2.0 * a)).clamp(x[0], x[2])
}

/// Density and spin direction along z at a fixed angle φ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField {
    pub z: Vec<f64>,
    pub rho: Vec<f64>,
    /// Polar angle of the spin, in [0, π].
    pub alpha: Vec<f64>,
    /// Azimuth of the spin: φ, or φ + π where the components have opposite signs.
    pub beta: Vec<f64>,
    /// Samples where both components vanish and α was interpolated.
    pub flagged: Vec<bool>,
}

impl SpinField {
    /// n̂ = (sin α cos β, sin α sin β, cos α).
    pub fn direction(&self, i: usize) -> [f64; 3] {
        let (sa, ca) = self.alpha[i].sin_cos();
        let (sb, cb) = self.beta[i].sin_cos();
        [sa * cb, sa * sb, ca]
    }
}

/// Spin field of an energy eigenstate seen at angle `phi` on the cylinder.
pub fn spin_field(profile: &SpinorProfile, phi: f64) -> SpinField {
    let n = profile.len();
    let mut rho = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut flagged = Vec::with_capacity(n);
    for (&p, &m) in profile.z_plus.iter().zip(&profile.z_minus) {
        rho.push(p.hypot(m));
        let dead = p == 0.0 && m == 0.0;
        flagged.push(dead);
        alpha.push(if dead { f64::NAN } else { 2.0 * m.abs().atan2(p.abs()) });
        beta.push(if p * m < 0.0 { phi + PI } else { phi });
    }
    for i in 0..n {
        if flagged[i] {
            let left = (0..i).rev().find(|&j| !flagged[j]).map(|j| alpha[j]);
            let right = (i + 1..n).find(|&j| !flagged[j]).map(|j| alpha[j]);
            alpha[i] = match (left, right) {
                (Some(l), Some(r)) => 0.5 * (l + r),
                (Some(v), None) | (None, Some(v)) => v,
                (None, None) => 0.5 * PI,
            };
        }
    }
    SpinField {
        z: profile.z.clone(),
        rho,
        alpha,
        beta,
        flagged,
    }
}

/// E_s and E_a of the ground pair from a stored (symmetric) solution.
pub fn pair_energies(sol: &PerturbationSolution, epsilon: f64) -> (f64, f64) {
    let sym = sol.with_branch(Branch::Symmetric).total_energy(epsilon);
    let anti = sol.with_branch(Branch::Antisymmetric).total_energy(epsilon);
    (sym, anti)
}

/// E_s = Σ ε^k E_0^(k) and E_a = Σ (−ε)^k E_0^(k) at the configured order.
pub fn eigen_energies(config: &ValidConfig) -> Result<(f64, f64)> {
    let sol = solve_perturbation(0, config.series_order, Branch::Symmetric, config)?;
    Ok(pair_energies(&sol, config.epsilon))
}

/// Two-level system spanned by the symmetric and antisymmetric ground states.
/// Amplitudes are quoted in the localized basis
/// |down⟩ = (|s⟩ + |a⟩)/√2, |up⟩ = (|s⟩ − |a⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateSystem {
    pub e_sym: f64,
    pub e_anti: f64,
    initial_up: Complex64,
    initial_down: Complex64,
}

impl TwoStateSystem {
    /// Starts fully spin-down, i.e. localized in the well at z = −b.
    pub fn new(e_sym: f64, e_anti: f64) -> Self {
        Self {
            e_sym,
            e_anti,
            initial_up: Complex64::new(0.0, 0.0),
            initial_down: Complex64::new(1.0, 0.0),
        }
    }

    /// Arbitrary initial mixing; the amplitudes are normalized here.
    pub fn with_initial(e_sym: f64, e_anti: f64, up: Complex64, down: Complex64) -> Self {
        let norm = (up.norm_sqr() + down.norm_sqr()).sqrt();
        Self {
            e_sym,
            e_anti,
            initial_up: up / norm,
            initial_down: down / norm,
        }
    }

    /// Ω = (E_s − E_a)/2.
    pub fn omega(&self) -> f64 {
        0.5 * (self.e_sym - self.e_anti)
    }

    pub fn mean_energy(&self) -> f64 {
        0.5 * (self.e_sym + self.e_anti)
    }

    pub fn initial(&self) -> (Complex64, Complex64) {
        (self.initial_up, self.initial_down)
    }

    /// Initial state in the (|s⟩, |a⟩) eigenbasis.
    pub fn initial_eigen_amplitudes(&self) -> (Complex64, Complex64) {
        (
            (self.initial_up + self.initial_down) * FRAC_1_SQRT_2,
            (self.initial_down - self.initial_up) * FRAC_1_SQRT_2,
        )
    }
}

/// (amp_up, amp_down) at time t, including the common phase e^{−iĒt}.
/// From pure spin-down this is e^{−iĒt}(−i sin Ωt, cos Ωt).
pub fn rabi_evolution(sys: &TwoStateSystem, t: f64) -> (Complex64, Complex64) {
    let (s, c) = (sys.omega() * t).sin_cos();
    let phase = Complex64::from_polar(1.0, -sys.mean_energy() * t);
    let mi = Complex64::new(0.0, -1.0);
    let up = sys.initial_up * c + mi * s * sys.initial_down;
    let down = sys.initial_down * c + mi * s * sys.initial_up;
    (phase * up, phase * down)
}

/// (P_up, P_down) at time t.
pub fn rabi_probabilities(sys: &TwoStateSystem, t: f64) -> (f64, f64) {
    let (up, down) = rabi_evolution(sys, t);
    (up.norm_sqr(), down.norm_sqr())
}

/// Places the profile on the cylinder:
/// Ψ₊ = e^{iℓφ} Z₊/√(2π), Ψ₋ = e^{i(ℓ+1)φ} Z₋/√(2π).
pub fn assemble_cylinder_spinor(profile: &SpinorProfile, n_phi: usize) -> ComplexField {
    let grid = FieldGrid::new(n_phi, profile.z.clone());
    let inv = 1.0 / (2.0 * PI).sqrt();
    let ell = profile.ell as f64;
    let mut plus = Vec::with_capacity(grid.len());
    let mut minus = Vec::with_capacity(grid.len());
    for iz in 0..profile.len() {
        for j in 0..n_phi {
            let phi = grid.phi(j);
            plus.push(Complex64::from_polar(inv * profile.z_plus[iz], ell * phi));
            minus.push(Complex64::from_polar(inv * profile.z_minus[iz], (ell + 1.0) * phi));
        }
    }
    ComplexField::new(grid, vec![plus, minus])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::{solve_unchecked, synthesize_wavefunction};

    fn ground(b: f64, k: usize) -> PerturbationSolution {
        solve_unchecked(0, k, Branch::Symmetric, b, 64).unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn anchors_at_the_midpoint() {
        let sol = ground(2.0, 2);
        let sym = synthesize_wavefunction(&sol, 0.5, &[-1.0]);
        let f = spin_field(&sym, 0.0);
        assert!((f.alpha[0] - PI / 2.0).abs() < 1e-10);
        let n = f.direction(0);
        assert!((n[0] - 1.0).abs() < 1e-12 && n[2].abs() < 1e-12);

        let anti = synthesize_wavefunction(&sol.with_branch(Branch::Antisymmetric), 0.5, &[-1.0]);
        let f = spin_field(&anti, 0.0);
        assert!((f.alpha[0] - PI / 2.0).abs() < 1e-10);
        let n = f.direction(0);
        assert!((n[0] + 1.0).abs() < 1e-12, "antisymmetric spin points along -rho: {n:?}");
    }

    #[test]
    fn spin_follows_the_angle() {
        let sol = ground(2.0, 2);
        let p = synthesize_wavefunction(&sol, 0.5, &[-1.0]);
        let phi = 0.8;
        let f = spin_field(&p, phi);
        let n = f.direction(0);
        assert!((n[0] - phi.cos()).abs() < 1e-12 && (n[1] - phi.sin()).abs() < 1e-12);
    }

    #[test]
    fn unit_direction_everywhere() {
        let sol = ground(2.0, 2);
        let p = synthesize_wavefunction(&sol, 0.5, &grid(-8.0, 6.0, 141));
        let f = spin_field(&p, 1.3);
        for i in 0..f.z.len() {
            let n = f.direction(i);
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            assert!((len - 1.0).abs() < 1e-14);
            assert!((0.0..=PI).contains(&f.alpha[i]));
        }
    }

    #[test]
    fn dead_samples_are_interpolated_and_flagged() {
        let profile = SpinorProfile {
            z: vec![0.0, 1.0, 2.0],
            z_plus: vec![1.0, 0.0, 0.0],
            z_minus: vec![0.0, 0.0, 1.0],
            ell: 0,
            b: 2.0,
            level: 0,
            epsilon: 0.0,
            energy: 0.5,
            branch: Branch::Symmetric,
            convergence_ratio: None,
        };
        let f = spin_field(&profile, 0.0);
        assert_eq!(f.flagged, vec![false, true, false]);
        assert!((f.alpha[1] - PI / 2.0).abs() < 1e-15);
        assert_eq!(f.alpha[0], 0.0);
        assert_eq!(f.alpha[2], PI);
    }

    #[test]
    fn synthesized_profile_is_normalized() {
        let sol = ground(2.0, 2);
        for branch in [Branch::Symmetric, Branch::Antisymmetric] {
            let p = synthesize_wavefunction(&sol.with_branch(branch), 0.5, &grid(-12.0, 10.0, 2201));
            assert!((p.discrete_norm() - 1.0).abs() < 1e-8, "{branch:?}: {}", p.discrete_norm());
        }
    }

    #[test]
    fn branch_relation_on_mirrored_samples() {
        let b = 2.0;
        let sol = ground(b, 2);
        // samples symmetric about −b/2, so z_i and −z_i − b are both present
        let z = grid(-7.0, 5.0, 121);
        for (branch, sign) in [(Branch::Symmetric, 1.0), (Branch::Antisymmetric, -1.0)] {
            let p = synthesize_wavefunction(&sol.with_branch(branch), 0.5, &z);
            let n = z.len();
            for i in 0..n {
                assert!((p.z_minus[i] - sign * p.z_plus[n - 1 - i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_crossing_in_symmetric_upper_component() {
        let sol = ground(2.0, 2);
        for k in 1..=2 {
            let sol_k = solve_unchecked(0, k, Branch::Symmetric, 2.0, 64).unwrap();
            let p = synthesize_wavefunction(&sol_k, 0.5, &grid(-12.0, 6.0, 1801));
            let crossings = p.zplus_sign_changes();
            assert!(crossings.iter().any(|&z| z < 0.0), "K={k}: {crossings:?}");
        }
        let p = synthesize_wavefunction(&sol, 0.0, &grid(-12.0, 6.0, 1801));
        assert!(p.zplus_sign_changes().is_empty());
    }

    #[test]
    fn pair_energies_structure() {
        let sol = ground(2.0, 2);
        let (s, a) = pair_energies(&sol, 0.0);
        assert_eq!((s, a), (0.5, 0.5));
        let eps = 0.3;
        let (s, a) = pair_energies(&sol, eps);
        let e = sol.energies();
        assert!((s + a - (1.0 + 2.0 * eps * eps * e[2])).abs() < 1e-15);
        assert!((s - a - 2.0 * eps * e[1]).abs() < 1e-15);
    }

    #[test]
    fn rabi_quarter_period_and_start() {
        let sys = TwoStateSystem::new(0.6, 0.4);
        let (up, down) = rabi_evolution(&sys, 0.0);
        assert_eq!(up.norm(), 0.0);
        assert!((down.norm() - 1.0).abs() < 1e-15);
        let t = PI / (2.0 * sys.omega());
        let (pu, pd) = rabi_probabilities(&sys, t);
        assert!((pu - 1.0).abs() < 1e-12 && pd < 1e-12);
    }

    #[test]
    fn rabi_amplitude_shape() {
        let sys = TwoStateSystem::new(0.7, 0.3);
        let t = 1.234;
        let (up, down) = rabi_evolution(&sys, t);
        let phase = Complex64::from_polar(1.0, -sys.mean_energy() * t);
        let w = sys.omega() * t;
        assert!((up - phase * Complex64::new(0.0, -w.sin())).norm() < 1e-15);
        assert!((down - phase * w.cos()).norm() < 1e-15);
    }

    #[test]
    fn rabi_unitarity_for_general_start() {
        let sys = TwoStateSystem::with_initial(0.9, 0.2, Complex64::new(0.3, 0.4), Complex64::new(-1.0, 0.2));
        for i in 0..200 {
            let (pu, pd) = rabi_probabilities(&sys, 0.05 * i as f64);
            assert!((pu + pd - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_spinor_layout() {
        let sol = ground(2.0, 2);
        let p = synthesize_wavefunction(&sol, 0.5, &grid(-4.0, 2.0, 13));
        let field = assemble_cylinder_spinor(&p, 16);
        let inv = 1.0 / (2.0 * PI).sqrt();
        for iz in 0..13 {
            assert!((field.get(0, iz, 0).re - p.z_plus[iz] * inv).abs() < 1e-15);
            assert!((field.get(1, iz, 0).re - p.z_minus[iz] * inv).abs() < 1e-15);
            for j in 0..16 {
                let up = field.get(0, iz, j);
                let dn = field.get(1, iz, j);
                assert!((up.norm() - p.z_plus[iz].abs() * inv).abs() < 1e-15);
                if up.norm() > 1e-12 && dn.norm() > 1e-12 && p.z_plus[iz] * p.z_minus[iz] > 0.0 {
                    let rel = (dn / up).arg();
                    let phi = field.grid().phi(j);
                    let diff = (rel - phi).rem_euclid(2.0 * PI);
                    assert!(diff < 1e-12 || 2.0 * PI - diff < 1e-12);
                }
            }
        }
    }
}
