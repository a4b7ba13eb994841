//! Truncated power series in one variable.
//!
//! A series of degree D stores the coefficients of x⁰ … x^D. Here x stands
//! for the raising operator a†, so a series f represents the ket f(a†)|0⟩ and
//! the coefficient of xᵐ corresponds to a Fock amplitude a_m·√(m!).

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![0.0; degree + 1],
        }
    }

    pub fn one(degree: usize) -> Self {
        Self::monomial(0, 1.0, degree)
    }

    /// `value · x^power`. Panics if `power > degree`.
    pub fn monomial(power: usize, value: f64, degree: usize) -> Self {
        assert!(power <= degree, "x^{power} does not fit in degree {degree}");
        let mut s = Self::zero(degree);
        s.coeffs[power] = value;
        s
    }

    /// Panics on an empty coefficient list.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        Self { coeffs }
    }

    /// Coefficients λᵏ/k! of e^{λx}, k = 0 … D.
    pub fn exp_linear(lambda: f64, degree: usize) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut term = 1.0;
        coeffs.push(term);
        for k in 1..=degree {
            term *= lambda / k as f64;
            coeffs.push(term);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of xᵐ; zero beyond the stored degree.
    pub fn coeff(&self, m: usize) -> f64 {
        self.coeffs.get(m).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, m: usize, value: f64) {
        self.coeffs[m] = value;
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Self) {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
    }

    /// Cauchy product truncated at the common degree.
    pub fn multiply(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        let d = self.degree();
        let mut out = vec![0.0; d + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs[..=d - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Re-expands f(−x − c) exactly in powers of x (same degree).
    pub fn reflect_shift(&self, c: f64) -> Self {
        // f(−u), then the Taylor shift u = x + c by repeated synthetic division
        let mut a: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
            .collect();
        let d = self.degree();
        for i in 0..d {
            for j in (i..d).rev() {
                a[j] += c * a[j + 1];
            }
        }
        Self { coeffs: a }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// r-th derivative evaluated at `x`.
    pub fn derivative_at(&self, r: usize, x: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate().skip(r).rev() {
            let falling: f64 = ((j - r + 1)..=j).map(|v| v as f64).product();
            acc = acc * x + c * falling;
        }
        acc
    }

    /// Fock amplitudes a_m·√(m!) of the ket f(a†)|0⟩.
    pub fn fock_amplitudes(&self) -> Vec<f64> {
        let mut ln_sqrt_fact = 0.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                if m > 0 {
                    ln_sqrt_fact += 0.5 * (m as f64).ln();
                }
                if c == 0.0 {
                    0.0
                } else {
                    c.signum() * (c.abs().ln() + ln_sqrt_fact).exp()
                }
            })
            .collect()
    }

    /// ‖f(a†)|0⟩‖ = (Σ a_m² m!)^{1/2}.
    pub fn fock_norm(&self) -> f64 {
        self.fock_amplitudes().iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Largest Fock amplitude among the top `count` stored degrees.
    pub fn tail_amplitude(&self, count: usize) -> f64 {
        let amps = self.fock_amplitudes();
        let start = amps.len().saturating_sub(count.max(1));
        amps[start..].iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Largest coefficientwise difference, treating missing degrees as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|m| (self.coeff(m) - other.coeff(m)).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: Self) -> TruncatedSeries {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: Self) -> TruncatedSeries {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.multiply(rhs)
    }
}

impl Mul<f64> for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: f64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        self.scale(-1.0)
    }
}
