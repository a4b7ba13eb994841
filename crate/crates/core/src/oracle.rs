//! Brute-force reference results: the coupled spinor problem diagonalized in
//! a truncated pair of displaced Fock bases, and spinless time evolution
//! resummed over oscillator eigenstates.
//!
//! Nothing here reuses the perturbation series or the closed-form evolution;
//! agreement between the two routes is the point.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::ValidConfig;
use crate::perturbation::Branch;
use crate::sho::build_overlap_matrix;

/// Largest acceptable ‖Hv − λv‖ for a returned eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Sweep cap for the Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenbasis expansion coefficients are summed until they drop below this.
pub const EXPANSION_TAIL_TOL: f64 = 1e-12;

const MAX_EXPANSION_TERMS: usize = 1000;

/// Spinor Hamiltonian in the basis (|n⟩ centred at 0 for Z₊, |m⟩ centred at
/// −b for Z₋), n, m < N. Row-major 2N × 2N.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledFockMatrix {
    fock_dim: usize,
    b: f64,
    epsilon: f64,
    entries: Vec<f64>,
}

impl CoupledFockMatrix {
    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    /// Side length, 2N.
    pub fn size(&self) -> usize {
        2 * self.fock_dim
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size() + j]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.size())
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// H = [[diag(n+½), εTᵀ], [εT, diag(n+½)]] with T[m][n] = ⟨m; −b | n; 0⟩.
pub fn coupled_matrix(fock_dim: usize, b: f64, epsilon: f64) -> Result<CoupledFockMatrix> {
    if fock_dim == 0 {
        return Err(Error::InvalidArgument("Fock dimension must be at least 1".into()));
    }
    let t = build_overlap_matrix(fock_dim, b)?;
    let size = 2 * fock_dim;
    let mut entries = vec![0.0; size * size];
    for n in 0..fock_dim {
        let level = n as f64 + 0.5;
        entries[n * size + n] = level;
        entries[(fock_dim + n) * size + fock_dim + n] = level;
    }
    for m in 0..fock_dim {
        for n in 0..fock_dim {
            let v = epsilon * t.get(m, n);
            entries[(fock_dim + m) * size + n] = v;
            entries[n * size + fock_dim + m] = v;
        }
    }
    Ok(CoupledFockMatrix {
        fock_dim,
        b,
        epsilon,
        entries,
    })
}

pub fn build_coupled_matrix(config: &ValidConfig) -> Result<CoupledFockMatrix> {
    coupled_matrix(config.fock_dim, config.b, config.epsilon)
}

/// Eigenpairs sorted by ascending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ⟨v|P|v⟩ for the reflection z → −z − b combined with the spin flip;
    /// +1 for symmetric states and −1 for antisymmetric ones.
    pub fn parity(&self, i: usize) -> f64 {
        let v = &self.vectors[i];
        let pv = reflect_swap(v);
        v.iter().zip(&pv).map(|(a, b)| a * b).sum()
    }

    pub fn classify(&self, i: usize) -> Branch {
        if self.parity(i) >= 0.0 {
            Branch::Symmetric
        } else {
            Branch::Antisymmetric
        }
    }

    /// Eigenvalue of the `level`-th state (0-based) within one branch.
    pub fn branch_level(&self, branch: Branch, level: usize) -> Option<f64> {
        (0..self.len())
            .filter(|&i| self.classify(i) == branch)
            .nth(level)
            .map(|i| self.values[i])
    }
}

/// The reflect-and-swap involution in the Fock pair basis:
/// (u_n, d_m) ↦ ((−1)^n d_n, (−1)^m u_m).
pub fn reflect_swap(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut out = vec![0.0; v.len()];
    for k in 0..n {
        out[k] = sign(k) * v[n + k];
        out[n + k] = sign(k) * v[k];
    }
    out
}

/// Cyclic Jacobi diagonalization. Every returned pair is checked against the
/// original matrix.
pub fn exact_spectrum(matrix: &CoupledFockMatrix) -> Result<Spectrum> {
    let n = matrix.size();
    if let Some(pos) = matrix.entries.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite matrix entry at ({}, {})",
            pos / n,
            pos % n
        )));
    }
    let mut a = matrix.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > 1e-14 * scale {
        if sweeps == MAX_JACOBI_SWEEPS {
            return Err(Error::EigenNotConverged {
                sweeps,
                off_norm: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    for (index, (lambda, vec)) in values.iter().zip(&vectors).enumerate() {
        let hv = matrix.apply(vec);
        let residual = hv
            .iter()
            .zip(vec)
            .map(|(h, x)| (h - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual > EIGEN_RESIDUAL_TOL {
            return Err(Error::EigenResidual { index, residual });
        }
    }
    Ok(Spectrum {
        values,
        vectors,
        sweeps,
    })
}

/// Lowest symmetric and antisymmetric oracle eigenvalues for each ε, solved
/// in parallel.
pub fn oracle_pair_energies(fock_dim: usize, b: f64, epsilons: &[f64]) -> Result<Vec<(f64, f64)>> {
    epsilons
        .par_iter()
        .map(|&eps| {
            let spectrum = exact_spectrum(&coupled_matrix(fock_dim, b, eps)?)?;
            let pick = |branch| {
                spectrum
                    .branch_level(branch, 0)
                    .ok_or_else(|| Error::InvalidArgument(format!("no {} state found", branch.name())))
            };
            Ok((pick(Branch::Symmetric)?, pick(Branch::Antisymmetric)?))
        })
        .collect()
}

/// Largest change of the lowest `count` eigenvalues between Fock dimensions
/// `small` and `large`.
pub fn truncation_sensitivity(b: f64, epsilon: f64, small: usize, large: usize, count: usize) -> Result<f64> {
    let a = exact_spectrum(&coupled_matrix(small, b, epsilon)?)?;
    let z = exact_spectrum(&coupled_matrix(large, b, epsilon)?)?;
    Ok(a.values
        .iter()
        .zip(&z.values)
        .take(count)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// ⟨n; −ℓb | 0; 0⟩ = (ℓb/√2)^n e^{−(ℓb)²/4}/√n!, extended until the terms
/// fall below [`EXPANSION_TAIL_TOL`] past the peak.
pub fn expansion_coefficients(ell: i32, b: f64) -> Result<Vec<f64>> {
    let d = ell as f64 * b;
    let x = d / std::f64::consts::SQRT_2;
    let peak = x * x;
    let mut out = Vec::new();
    let mut log_abs = -0.25 * d * d;
    for n in 0..MAX_EXPANSION_TERMS {
        if n > 0 {
            log_abs += x.abs().ln() - 0.5 * (n as f64).ln();
        }
        let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        let c = if x == 0.0 && n > 0 { 0.0 } else { sign * log_abs.exp() };
        out.push(c);
        if n as f64 > peak && c.abs() < EXPANSION_TAIL_TOL {
            return Ok(out);
        }
    }
    Err(Error::Truncation {
        what: "eigenbasis expansion",
        tail: out.last().map_or(f64::NAN, |c| c.abs()),
        tolerance: EXPANSION_TAIL_TOL,
    })
}

/// Oscillator eigenfunctions ψ_0..ψ_{len−1} at x. Kept local so the oracle
/// does not lean on the basis module it checks.
fn oscillator_functions(x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for n in 0..len {
        out.push(cur);
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

/// The z part of mode ℓ at time t, started from the centred Gaussian, by
/// expanding in the oscillator states about −ℓb and attaching e^{−i(n+½)t}.
/// This is the exact solution, global phase included.
pub fn eigenbasis_evolution(ell: i32, b: f64, t: f64, z: &[f64]) -> Result<Vec<Complex64>> {
    let coeffs = expansion_coefficients(ell, b)?;
    let phases: Vec<Complex64> = (0..coeffs.len())
        .map(|n| Complex64::from_polar(coeffs[n], -(n as f64 + 0.5) * t))
        .collect();
    let shift = ell as f64 * b;
    Ok(z
        .par_iter()
        .map(|&zi| {
            oscillator_functions(zi + shift, coeffs.len())
                .iter()
                .zip(&phases)
                .map(|(psi, c)| c * psi)
                .sum()
        })
        .collect())
}

/// Outcome of fitting log|residual| against log ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderFit {
    Slope(f64),
    /// Every residual sits at the floating-point floor.
    Indistinguishable,
}

/// Least-squares slope of log|E_series − E_oracle| against log ε.
pub fn richardson_order_check(series: &[f64], oracle: &[f64], epsilons: &[f64]) -> Result<OrderFit> {
    if series.len() != oracle.len() || series.len() != epsilons.len() {
        return Err(Error::InvalidArgument("energy and epsilon lists differ in length".into()));
    }
    if epsilons.len() < 3 {
        return Err(Error::InvalidArgument("need at least three epsilon values".into()));
    }
    if epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("epsilon values must be positive".into()));
    }
    let residuals: Vec<f64> = series.iter().zip(oracle).map(|(s, o)| (s - o).abs()).collect();
    let floor: Vec<f64> = oracle.iter().map(|o| 64.0 * f64::EPSILON * o.abs().max(1.0)).collect();
    if residuals.iter().zip(&floor).all(|(r, f)| r <= f) {
        return Ok(OrderFit::Indistinguishable);
    }
    if residuals.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::DegenerateFit(residuals));
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(OrderFit::Slope(sxy / sxx))
}

/// Two-level evolution done the long way: rotate (up, down) into the
/// (symmetric, antisymmetric) eigenbasis, attach e^{−iEt}, rotate back.
pub fn two_level_evolution(
    e_sym: f64,
    e_anti: f64,
    up: Complex64,
    down: Complex64,
    t: f64,
) -> (Complex64, Complex64) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // |s⟩ = (|up⟩ + |down⟩)/√2, |a⟩ = (|down⟩ − |up⟩)/√2
    let basis = [[r, r], [-r, r]];
    let energies = [e_sym, e_anti];
    let start = [up, down];
    let mut amps = [Complex64::new(0.0, 0.0); 2];
    for (k, row) in basis.iter().enumerate() {
        amps[k] = row[0] * start[0] + row[1] * start[1];
        amps[k] *= Complex64::from_polar(1.0, -energies[k] * t);
    }
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = basis[0][j] * amps[0] + basis[1][j] * amps[1];
    }
    (out[0], out[1])
}
