//! Harmonic-oscillator eigenfunctions and displaced-state overlaps.
//!
//! ψ_n(z) = N_n H_n(z) e^{−z²/2} with N_n = (2ⁿ n! √π)^{−1/2}. All evaluations
//! go through three-term recurrences; the explicit polynomial sums are never
//! formed.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// π^{−1/4}, the normalization of the oscillator ground state.
pub const PI_M4: f64 = 0.751_125_544_464_942_5;

/// Caches the physicists' Hermite polynomials and the normalized oscillator
/// functions up to a fixed order.
#[derive(Debug, Clone)]
pub struct HermiteEvaluator {
    max_order: usize,
    workspace: Vec<f64>,
}

impl HermiteEvaluator {
    pub fn new(max_order: usize) -> Self {
        Self {
            max_order,
            workspace: vec![0.0; max_order + 1],
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// H_0(z) … H_max(z) via H_{n+1} = 2z H_n − 2n H_{n−1}.
    pub fn polynomials(&mut self, z: f64) -> &[f64] {
        let h = &mut self.workspace;
        h[0] = 1.0;
        if self.max_order >= 1 {
            h[1] = 2.0 * z;
        }
        for n in 1..self.max_order {
            h[n + 1] = 2.0 * z * h[n] - 2.0 * n as f64 * h[n - 1];
        }
        &self.workspace
    }

    /// ψ_0(z) … ψ_max(z). The normalization and the Gaussian are folded into
    /// the recurrence so that no intermediate overflows.
    pub fn functions(&mut self, z: f64) -> &[f64] {
        fill_hermite_functions(z, &mut self.workspace);
        &self.workspace
    }

    /// Oscillator eigenfunction of order `n` centred at `center`.
    pub fn eigenfunction(&mut self, n: usize, center: f64, z: f64) -> Result<f64> {
        if n > self.max_order {
            return Err(Error::HermiteOrder {
                n,
                max_order: self.max_order,
            });
        }
        Ok(self.functions(z - center)[n])
    }
}

/// Fills `out[n] = ψ_n(x)` for every `n < out.len()`.
pub fn fill_hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI_M4 * (-0.5 * x * x).exp();
    scaled_recurrence(x, out);
}

/// Fills `out[n] = N_n H_n(x)` (no Gaussian factor).
pub fn fill_normalized_hermite(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI_M4;
    scaled_recurrence(x, out);
}

fn scaled_recurrence(x: f64, out: &mut [f64]) {
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for j in 1..out.len().saturating_sub(1) {
        let jf = j as f64;
        out[j + 1] = (2.0 / (jf + 1.0)).sqrt() * x * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
    }
}

/// ψ_n(z − center), i.e. N_n H_n(z + ℓb) e^{−(z+ℓb)²/2} for `center = −ℓb`.
pub fn eigenfunction(n: usize, center: f64, z: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    fill_hermite_functions(z - center, &mut buf);
    buf[n]
}

/// Overlap ∫ψ_0(z + b) ψ_k(z) dz between the ground state displaced to −b
/// and the k-th state at the origin: (1/√k!)(−b/√2)^k e^{−b²/4}.
pub fn overlap_row0(k: usize, b: f64) -> f64 {
    let alpha = -b / std::f64::consts::SQRT_2;
    let mut term = (-0.25 * b * b).exp();
    for j in 1..=k {
        term *= alpha / (j as f64).sqrt();
    }
    term
}

/// Gauss–Hermite rule for ∫ e^{−x²} f(x) dx.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("Gauss-Hermite rule needs at least one node".into()));
        }
        const MAX_ITER: usize = 100;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        let mut z = 0.0_f64;
        for i in 0..m.div_ceil(2) {
            z = match i {
                0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * mf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut converged = false;
            let mut last_step = f64::INFINITY;
            for _ in 0..MAX_ITER {
                let (p1, p2) = normalized_pair(m, z);
                last_step = p1 / ((2.0 * mf).sqrt() * p2);
                z -= last_step;
                if last_step.abs() <= 3e-14 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::QuadratureNotConverged {
                    what: "Gauss-Hermite node",
                    deviation: last_step.abs(),
                });
            }
            let (_, p2) = normalized_pair(m, z);
            let pp = (2.0 * mf).sqrt() * p2;
            nodes[i] = z;
            nodes[m - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[m - 1 - i] = weights[i];
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// (p̃_m(z), p̃_{m−1}(z)) for the normalized Hermite polynomials.
fn normalized_pair(m: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI_M4;
    let mut p2 = 0.0;
    for j in 1..=m {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Displaced-overlap matrix T[n][m] = ∫ψ_n(z + b) ψ_m(z) dz: the row index
/// runs over states centred at −b, the column index over states at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    dim: usize,
    displacement: f64,
    entries: Vec<f64>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[n * self.dim + m]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.entries[n * self.dim..(n + 1) * self.dim]
    }
}

fn overlap_by_quadrature(dim: usize, b: f64, rule: &GaussHermite) -> Vec<f64> {
    // with u = z + b/2 the two Gaussians combine to e^{−u²} e^{−b²/4}
    let prefactor = (-0.25 * b * b).exp();
    let mut entries = vec![0.0; dim * dim];
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        fill_normalized_hermite(u + 0.5 * b, &mut left);
        fill_normalized_hermite(u - 0.5 * b, &mut right);
        let scale = w * prefactor;
        for (n, &l) in left.iter().enumerate() {
            let sl = scale * l;
            for (entry, &r) in entries[n * dim..(n + 1) * dim].iter_mut().zip(&right) {
                *entry += sl * r;
            }
        }
    }
    entries
}

/// Builds the `dim × dim` overlap matrix with a Gauss–Hermite rule that is
/// exact for the polynomial part, and confirms the result against a rule
/// with more nodes.
pub fn build_overlap_matrix(dim: usize, b: f64) -> Result<OverlapMatrix> {
    if dim < 1 {
        return Err(Error::InvalidArgument("overlap matrix needs dim >= 1".into()));
    }
    if !b.is_finite() {
        return Err(Error::InvalidArgument(format!("displacement must be finite, got {b}")));
    }
    let coarse = overlap_by_quadrature(dim, b, &GaussHermite::new(dim + 8)?);
    let fine = overlap_by_quadrature(dim, b, &GaussHermite::new(dim + 24)?);
    let deviation = coarse
        .iter()
        .zip(&fine)
        .map(|(a, f)| (a - f).abs())
        .fold(0.0, f64::max);
    if deviation > 1e-12 {
        return Err(Error::QuadratureNotConverged {
            what: "displaced overlap matrix",
            deviation,
        });
    }
    Ok(OverlapMatrix {
        dim,
        displacement: b,
        entries: fine,
    })
}

/// Normalization constant N_n = (2ⁿ n! √π)^{−1/2}, accumulated as a product.
pub fn normalization(n: usize) -> f64 {
    (1..=n).fold(PI.powf(-0.25), |acc, j| acc / (2.0 * j as f64).sqrt())
}
