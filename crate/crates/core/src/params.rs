//! Physical parameters and run configuration.
//!
//! Everything is expressed in oscillator units, ħ = m = ω = 1, so the cylinder
//! geometry enters only through the spacing `b` between neighbouring
//! oscillator wells and the spin coupling through `epsilon`.

use std::fmt::{self, Write as _};
use std::ops::Deref;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("b must be positive (got {0})")]
    NonPositiveB(f64),
    #[error("epsilon must be finite (got {0})")]
    NonFiniteEpsilon(f64),
    #[error("series_degree must be at least 1")]
    SeriesDegreeTooSmall,
    #[error("quad_nodes must be at least 2 (got {0})")]
    TooFewQuadNodes(usize),
    #[error("fock_dim too small: {fock_dim} < series_order + 2 = {required}")]
    FockDimTooSmall { fock_dim: usize, required: usize },
    #[error("grid too small: n_phi and n_z must be at least 2 (got {n_phi}x{n_z})")]
    GridTooSmall { n_phi: usize, n_z: usize },
    #[error("z_range must be finite and nonempty (got [{0}, {1}])")]
    BadZRange(f64, f64),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: cannot parse value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("cannot read config file: {0}")]
    Read(String),
}

impl ConfigError {
    /// Name of the violated invariant, used on the diagnostic stream.
    pub fn invariant(&self) -> &'static str {
        match self {
            ConfigError::NonPositiveB(_) => "b > 0",
            ConfigError::NonFiniteEpsilon(_) => "epsilon finite",
            ConfigError::SeriesDegreeTooSmall => "series_degree >= 1",
            ConfigError::TooFewQuadNodes(_) => "quad_nodes >= 2",
            ConfigError::FockDimTooSmall { .. } => "fock_dim >= series_order + 2",
            ConfigError::GridTooSmall { .. } => "n_phi, n_z >= 2",
            ConfigError::BadZRange(..) => "z_range finite and nonempty",
            ConfigError::UnknownKey { .. }
            | ConfigError::Malformed { .. }
            | ConfigError::BadValue { .. }
            | ConfigError::Read(_) => "config file syntax",
        }
    }
}

/// Raw, unvalidated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    /// Distance between neighbouring oscillator centres along z.
    pub b: f64,
    /// Spin coupling ε = −ħλB₀/2.
    pub epsilon: f64,
    /// Angular quantum number ℓ.
    pub ell: i32,
    /// Truncation degree D of the power series in a†.
    pub series_degree: usize,
    /// Highest perturbative order K.
    pub series_order: usize,
    pub quad_nodes: usize,
    /// Fock-space truncation per spin component in the oracle.
    pub fock_dim: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub n_phi: usize,
    pub n_z: usize,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            b: 2.0,
            epsilon: 0.5,
            ell: 0,
            series_degree: 64,
            series_order: 2,
            quad_nodes: 64,
            fock_dim: 60,
            z_min: -12.0,
            z_max: 6.0,
            n_phi: 256,
            n_z: 512,
        }
    }
}

const KEYS: [&str; 11] = [
    "b",
    "epsilon",
    "ell",
    "series_degree",
    "series_order",
    "quad_nodes",
    "fock_dim",
    "z_min",
    "z_max",
    "n_phi",
    "n_z",
];

impl PhysicsConfig {
    /// Checks every invariant in a fixed order and reports the first one violated.
    pub fn validate(self) -> Result<ValidConfig, ConfigError> {
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(ConfigError::NonPositiveB(self.b));
        }
        if !self.epsilon.is_finite() {
            return Err(ConfigError::NonFiniteEpsilon(self.epsilon));
        }
        if self.series_degree < 1 {
            return Err(ConfigError::SeriesDegreeTooSmall);
        }
        if self.quad_nodes < 2 {
            return Err(ConfigError::TooFewQuadNodes(self.quad_nodes));
        }
        let required = self.series_order + 2;
        if self.fock_dim < required {
            return Err(ConfigError::FockDimTooSmall {
                fock_dim: self.fock_dim,
                required,
            });
        }
        if self.n_phi < 2 || self.n_z < 2 {
            return Err(ConfigError::GridTooSmall {
                n_phi: self.n_phi,
                n_z: self.n_z,
            });
        }
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_min < self.z_max) {
            return Err(ConfigError::BadZRange(self.z_min, self.z_max));
        }
        Ok(ValidConfig(self))
    }

    /// Parses a flat `key = value` file on top of the defaults. `#` starts a
    /// comment; unknown keys are rejected.
    pub fn from_kv_str(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Malformed { line })?;
            config.set(line, key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
        Self::from_kv_str(&text)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadValue {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        match key {
            "b" => self.b = parse(line, key, value)?,
            "epsilon" => self.epsilon = parse(line, key, value)?,
            "ell" => self.ell = parse(line, key, value)?,
            "series_degree" => self.series_degree = parse(line, key, value)?,
            "series_order" => self.series_order = parse(line, key, value)?,
            "quad_nodes" => self.quad_nodes = parse(line, key, value)?,
            "fock_dim" => self.fock_dim = parse(line, key, value)?,
            "z_min" => self.z_min = parse(line, key, value)?,
            "z_max" => self.z_max = parse(line, key, value)?,
            "n_phi" => self.n_phi = parse(line, key, value)?,
            "n_z" => self.n_z = parse(line, key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Serializes in the same format `from_kv_str` reads. Floats use the
    /// shortest round-tripping representation.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "b" => self.b.to_string(),
                "epsilon" => self.epsilon.to_string(),
                "ell" => self.ell.to_string(),
                "series_degree" => self.series_degree.to_string(),
                "series_order" => self.series_order.to_string(),
                "quad_nodes" => self.quad_nodes.to_string(),
                "fock_dim" => self.fock_dim.to_string(),
                "z_min" => self.z_min.to_string(),
                "z_max" => self.z_max.to_string(),
                "n_phi" => self.n_phi.to_string(),
                "n_z" => self.n_z.to_string(),
                _ => unreachable!(),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}

/// A configuration that has passed [`PhysicsConfig::validate`]. Downstream
/// modules only accept this type.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidConfig(PhysicsConfig);

impl ValidConfig {
    pub fn into_inner(self) -> PhysicsConfig {
        self.0
    }

    /// `b / √2`, the well spacing expressed as a shift of the ladder variable.
    pub fn ladder_shift(&self) -> f64 {
        self.0.b / std::f64::consts::SQRT_2
    }
}

impl Default for ValidConfig {
    fn default() -> Self {
        PhysicsConfig::default()
            .validate()
            .expect("defaults satisfy every invariant")
    }
}

impl Deref for ValidConfig {
    type Target = PhysicsConfig;

    fn deref(&self) -> &PhysicsConfig {
        &self.0
    }
}

impl fmt::Display for ValidConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_kv_string())
    }
}
