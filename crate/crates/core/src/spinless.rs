//! Exact spinless dynamics: the degenerate spectrum, rigid oscillation of
//! displaced Gaussians, and the Fourier-transformer protocol that sorts the
//! angular modes of an initial state into separate Gaussians along z.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sho::PI_M4;

/// Minimum distance between neighbouring readout peaks, in oscillator lengths.
pub const MIN_PEAK_SEPARATION: f64 = 8.0;

/// E_{ℓ,n} = n + 1/2 for every ℓ.
pub fn energy(n: usize, _ell: i32) -> f64 {
    n as f64 + 0.5
}

/// Sampling grid on the unrolled cylinder: `n_phi` equally spaced angles in
/// [0, 2π) times an increasing list of z positions.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    n_phi: usize,
    z: Vec<f64>,
}

impl FieldGrid {
    pub fn new(n_phi: usize, z: Vec<f64>) -> Self {
        Self { n_phi, z }
    }

    pub fn uniform(n_phi: usize, z_min: f64, z_max: f64, n_z: usize) -> Self {
        Self::new(n_phi, linspace(z_min, z_max, n_z))
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn n_z(&self) -> usize {
        self.z.len()
    }

    pub fn len(&self) -> usize {
        self.n_phi * self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    /// Trapezoid weights along z.
    pub fn z_weights(&self) -> Vec<f64> {
        let n = self.z.len();
        let mut w = vec![0.0; n];
        for i in 0..n.saturating_sub(1) {
            let h = 0.5 * (self.z[i + 1] - self.z[i]);
            w[i] += h;
            w[i + 1] += h;
        }
        w
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One or two complex components sampled on a [`FieldGrid`], stored z-major
/// (index `iz * n_phi + iphi`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: FieldGrid,
    components: Vec<Vec<Complex64>>,
}

impl ComplexField {
    pub fn new(grid: FieldGrid, components: Vec<Vec<Complex64>>) -> Self {
        for c in &components {
            assert_eq!(c.len(), grid.len(), "component size does not match grid");
        }
        Self { grid, components }
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn get(&self, c: usize, iz: usize, iphi: usize) -> Complex64 {
        self.components[c][iz * self.grid.n_phi + iphi]
    }

    /// Σ over components of ∫∫|Ψ|² dφ dz (trapezoid in z, rectangle in φ).
    pub fn discrete_norm(&self) -> f64 {
        let wz = self.grid.z_weights();
        let n_phi = self.grid.n_phi;
        let dphi = self.grid.dphi();
        self.components
            .iter()
            .map(|c| {
                c.chunks(n_phi)
                    .zip(&wz)
                    .map(|(row, w)| w * row.iter().map(|v| v.norm_sqr()).sum::<f64>())
                    .sum::<f64>()
                    * dphi
            })
            .sum()
    }

    /// Largest |Ψ_c| over the grid.
    pub fn max_abs(&self, c: usize) -> f64 {
        self.components[c].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// |Ψ_c(φ_j, z)| along the whole z axis at angle index `iphi`.
    pub fn abs_column(&self, c: usize, iphi: usize) -> Vec<f64> {
        (0..self.grid.n_z()).map(|iz| self.get(c, iz, iphi).norm()).collect()
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }
}

/// Angular content f(φ) = Σ f_ℓ e^{iℓφ} of an initial state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AngularProfile {
    modes: BTreeMap<i32, Complex64>,
}

impl AngularProfile {
    pub fn from_modes<I: IntoIterator<Item = (i32, Complex64)>>(modes: I) -> Self {
        let mut map = BTreeMap::new();
        for (ell, f) in modes {
            *map.entry(ell).or_insert(Complex64::new(0.0, 0.0)) += f;
        }
        Self { modes: map }
    }

    pub fn single(ell: i32) -> Self {
        Self::from_modes([(ell, Complex64::new(1.0, 0.0))])
    }

    pub fn constant() -> Self {
        Self::single(0)
    }

    /// cos φ = (e^{iφ} + e^{−iφ})/2.
    pub fn cosine() -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self::from_modes([(-1, half), (1, half)])
    }

    /// 1 + e^{−iφ} + 1.5 e^{−2iφ} + e^{−3iφ}.
    pub fn ladder() -> Self {
        Self::from_modes([0, -1, -2, -3].into_iter().zip([1.0, 1.0, 1.5, 1.0]).map(|(l, a)| (l, Complex64::new(a, 0.0))))
    }

    /// Parses `cos`, `const`, `ladder`, `mode:<ℓ>`, or a comma list of
    /// `ℓ:re[:im]` entries.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        match text {
            "cos" => return Ok(Self::cosine()),
            "const" | "1" => return Ok(Self::constant()),
            "ladder" => return Ok(Self::ladder()),
            _ => {}
        }
        if let Some(rest) = text.strip_prefix("mode:") {
            let ell = rest
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad mode index in profile '{text}'")))?;
            return Ok(Self::single(ell));
        }
        let mut modes = Vec::new();
        for entry in text.split(',').filter(|s| !s.trim().is_empty()) {
            let parts: Vec<&str> = entry.split(':').map(str::trim).collect();
            let bad = || Error::InvalidArgument(format!("bad profile entry '{entry}'"));
            if !(2..=3).contains(&parts.len()) {
                return Err(bad());
            }
            let ell: i32 = parts[0].parse().map_err(|_| bad())?;
            let re: f64 = parts[1].parse().map_err(|_| bad())?;
            let im: f64 = match parts.get(2) {
                Some(s) => s.parse().map_err(|_| bad())?,
                None => 0.0,
            };
            modes.push((ell, Complex64::new(re, im)));
        }
        if modes.is_empty() {
            return Err(Error::InvalidArgument(format!("empty angular profile '{text}'")));
        }
        Ok(Self::from_modes(modes))
    }

    /// Modes of `f` sampled at φ_j = 2πj/N, for |ℓ| ≤ `max_mode`.
    pub fn from_samples(samples: &[Complex64], max_mode: i32) -> Self {
        let n = samples.len() as f64;
        Self::from_modes((-max_mode..=max_mode).map(|ell| {
            let sum: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, f)| f * Complex64::from_polar(1.0, -ell as f64 * 2.0 * PI * j as f64 / n))
                .sum();
            (ell, sum / n)
        }))
    }

    pub fn modes(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.modes.iter().map(|(l, f)| (*l, *f))
    }

    pub fn mode(&self, ell: i32) -> Complex64 {
        self.modes.get(&ell).copied().unwrap_or_default()
    }

    pub fn max_mode(&self) -> i32 {
        self.modes.keys().map(|l| l.abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, phi: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|(l, f)| f * Complex64::from_polar(1.0, *l as f64 * phi))
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_modes(self.modes().map(|(l, f)| (l, f * c)))
    }

    /// Rescaled so that Σ|f_ℓ|² = 1.
    pub fn normalized(&self) -> Self {
        let norm: f64 = self.modes.values().map(|f| f.norm_sqr()).sum::<f64>().sqrt();
        self.scaled(Complex64::new(1.0 / norm, 0.0))
    }

    /// A z window that holds every mode's oscillation plus `margin` on both sides.
    pub fn z_window(&self, b: f64, margin: f64) -> (f64, f64) {
        let ends = self.modes.keys().map(|l| -2.0 * *l as f64 * b).chain([0.0]);
        let (lo, hi) = ends.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z), hi.max(z)));
        (lo - margin, hi + margin)
    }
}

impl fmt::Display for AngularProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .modes
            .iter()
            .map(|(l, v)| format!("{l}:{}:{}", v.re, v.im))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// The z part of an evolved mode ℓ that started as the centred Gaussian:
/// N₀ e^{−it/2} e^{−i(z+ℓb)ℓb sin t} e^{−(z+ℓb(1−cos t))²/2}.
///
/// The ℓ-dependent global phase e^{iℓ²b²/4·sin 2t} is left out; see
/// [`omitted_global_phase`].
pub fn coherent_mode(ell: i32, b: f64, t: f64, z: f64) -> Complex64 {
    let lb = ell as f64 * b;
    let (s, c) = t.sin_cos();
    let centre = z + lb * (1.0 - c);
    let phase = -0.5 * t - (z + lb) * lb * s;
    Complex64::from_polar(PI_M4 * (-0.5 * centre * centre).exp(), phase)
}

/// Ψ_ℓ(φ, z, t) with the global phase omitted.
pub fn coherent_evolution(ell: i32, b: f64, t: f64, phi: f64, z: f64) -> Complex64 {
    coherent_mode(ell, b, t, z) * Complex64::from_polar((2.0 * PI).sqrt().recip(), ell as f64 * phi)
}

/// The phase e^{iℓ²b²/4·sin 2t} that [`coherent_evolution`] drops; the exact
/// Schrödinger solution is the product of the two.
pub fn omitted_global_phase(ell: i32, b: f64, t: f64) -> Complex64 {
    let lb = ell as f64 * b;
    Complex64::from_polar(1.0, 0.25 * lb * lb * (2.0 * t).sin())
}

/// Σ_ℓ f_ℓ Ψ_ℓ(φ, z, t) on `grid`. Warns when the modes will not separate.
pub fn fourier_transform_protocol(profile: &AngularProfile, b: f64, t: f64, grid: &FieldGrid) -> ComplexField {
    if profile.modes.len() > 1 && 2.0 * b < MIN_PEAK_SEPARATION {
        log::warn!("b = {b} is too small for the Fourier modes to separate (need b >= {})", MIN_PEAK_SEPARATION / 2.0);
    }
    let inv = (2.0 * PI).sqrt().recip();
    let n_phi = grid.n_phi();
    let modes: Vec<(i32, Complex64)> = profile.modes().collect();
    let angular: Vec<Vec<Complex64>> = modes
        .iter()
        .map(|(l, f)| {
            (0..n_phi)
                .map(|j| f * Complex64::from_polar(inv, *l as f64 * grid.phi(j)))
                .collect()
        })
        .collect();
    let rows: Vec<Vec<Complex64>> = grid
        .z()
        .par_iter()
        .map(|&z| {
            let radial: Vec<Complex64> = modes.iter().map(|(l, _)| coherent_mode(*l, b, t, z)).collect();
            (0..n_phi)
                .map(|j| radial.iter().zip(&angular).map(|(r, a)| r * a[j]).sum())
                .collect()
        })
        .collect();
    ComplexField::new(grid.clone(), vec![rows.concat()])
}

/// One protocol field per time stamp, evaluated in parallel.
pub fn evolution_frames(profile: &AngularProfile, b: f64, times: &[f64], grid: &FieldGrid) -> Vec<ComplexField> {
    times
        .par_iter()
        .map(|&t| fourier_transform_protocol(profile, b, t, grid))
        .collect()
}

/// How [`extract_modes`] scales the measured peak heights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeNormalization {
    /// Divide by the ℓ = 0 reading.
    ModeZero,
    /// Divide by the largest reading.
    #[default]
    Largest,
    /// Report |Ψ| itself.
    Raw,
}

/// Reads |Ψ(φ=0, z=−2ℓb)| for each requested ℓ from a field at t = π.
///
/// Between grid points the column is interpolated by a parabola in log|Ψ|,
/// which is exact for an isolated Gaussian.
pub fn extract_modes(
    field: &ComplexField,
    b: f64,
    ells: &[i32],
    normalization: ModeNormalization,
) -> Result<Vec<(i32, f64)>> {
    let mut sorted: Vec<i32> = ells.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for w in sorted.windows(2) {
        let separation = 2.0 * b * (w[1] - w[0]) as f64;
        if separation < MIN_PEAK_SEPARATION {
            return Err(Error::PeaksOverlap {
                separation,
                required: MIN_PEAK_SEPARATION,
            });
        }
    }
    let z = field.grid().z();
    let column = field.abs_column(0, 0);
    let mut readings = Vec::with_capacity(ells.len());
    for &ell in ells {
        let target = -2.0 * ell as f64 * b;
        readings.push((ell, log_interpolate(z, &column, target)?));
    }
    let denom = match normalization {
        ModeNormalization::Raw => 1.0,
        ModeNormalization::Largest => readings.iter().map(|r| r.1).fold(0.0, f64::max),
        ModeNormalization::ModeZero => readings
            .iter()
            .find(|r| r.0 == 0)
            .map(|r| r.1)
            .ok_or_else(|| Error::InvalidArgument("mode 0 was not requested".into()))?,
    };
    Ok(readings.into_iter().map(|(l, v)| (l, v / denom)).collect())
}

fn log_interpolate(z: &[f64], values: &[f64], target: f64) -> Result<f64> {
    let n = z.len();
    if n < 3 || target < z[0] || target > z[n - 1] {
        return Err(Error::InvalidArgument(format!(
            "readout point z = {target} lies outside the grid"
        )));
    }
    let i = match z.partition_point(|&v| v < target) {
        0 => 1,
        p if p >= n - 1 => n - 2,
        p if target - z[p - 1] < z[p] - target => p - 1,
        p => p,
    }
    .clamp(1, n - 2);
    let (x, v) = ([z[i - 1], z[i], z[i + 1]], [values[i - 1], values[i], values[i + 1]]);
    if v.iter().any(|&u| u <= f64::MIN_POSITIVE) {
        return Ok(if (target - x[1]).abs() < 1e-12 { v[1] } else { 0.0 });
    }
    let y = v.map(f64::ln);
    let f01 = (y[1] - y[0]) / (x[1] - x[0]);
    let f12 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (f12 - f01) / (x[2] - x[0]);
    Ok((y[0] + f01 * (target - x[0]) + a * (target - x[0]) * (target - x[1])).exp())
}

/// Local maxima of |Ψ(φ=0, z)| that exceed `fraction` of the column maximum.
pub fn count_peaks(field: &ComplexField, fraction: f64) -> usize {
    let column = field.abs_column(0, 0);
    let top = column.iter().copied().fold(0.0, f64::max);
    column
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2] && w[1] > fraction * top)
        .count()
}

/// Velocity of the classical particle: the magnetic force rotates (v_z, v_φ)
/// at unit angular frequency.
pub fn classical_trajectory(vz0: f64, vphi0: f64, t: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    (vz0 * c - vphi0 * s, vz0 * s + vphi0 * c)
}
