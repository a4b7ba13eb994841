use std::io;

use thiserror::Error;

use crate::params::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hermite order {n} exceeds evaluator capacity {max_order}")]
    HermiteOrder { n: usize, max_order: usize },

    #[error("{what}: quadrature did not converge (deviation {deviation:.3e})")]
    QuadratureNotConverged { what: &'static str, deviation: f64 },

    /// Two independent routes to the same quantity disagree.
    #[error("{what}: cross-check mismatch ({lhs:.17e} vs {rhs:.17e})")]
    CrossCheck {
        what: &'static str,
        lhs: f64,
        rhs: f64,
    },

    #[error("{what}: truncation tail {tail:.3e} above tolerance {tolerance:.1e}")]
    Truncation {
        what: &'static str,
        tail: f64,
        tolerance: f64,
    },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    EigenNotConverged { sweeps: usize, off_norm: f64 },

    #[error("eigenpair {index} residual {residual:.3e} above tolerance")]
    EigenResidual { index: usize, residual: f64 },

    #[error("argument {value} outside the overflow guard |y| < {limit}")]
    OverflowGuard { value: f64, limit: f64 },

    #[error("non-finite sample at grid index (z={iz}, phi={iphi}, component={component})")]
    NonFinite {
        iz: usize,
        iphi: usize,
        component: usize,
    },

    #[error("gaussian peaks overlap: separation {separation} below {required} widths")]
    PeaksOverlap { separation: f64, required: f64 },

    #[error("residuals {0:?} are not all positive and finite")]
    DegenerateFit(Vec<f64>),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code for the command-line front end: 1 for bad input,
    /// 2 for a failed convergence or cross-check.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::HermiteOrder { .. }
            | Error::OverflowGuard { .. }
            | Error::NonFinite { .. }
            | Error::PeaksOverlap { .. }
            | Error::DegenerateFit(_)
            | Error::Io(_) => 1,
            Error::QuadratureNotConverged { .. }
            | Error::CrossCheck { .. }
            | Error::Truncation { .. }
            | Error::EigenNotConverged { .. }
            | Error::EigenResidual { .. } => 2,
        }
    }

    /// Short name of the check that failed.
    pub fn invariant(&self) -> &'static str {
        match self {
            Error::Config(e) => e.invariant(),
            Error::InvalidArgument(_) => "argument validity",
            Error::HermiteOrder { .. } => "hermite order within capacity",
            Error::QuadratureNotConverged { .. } => "quadrature convergence",
            Error::CrossCheck { .. } => "independent routes agree",
            Error::Truncation { .. } => "truncation tail below tolerance",
            Error::EigenNotConverged { .. } => "eigensolver convergence",
            Error::EigenResidual { .. } => "eigenpair residual",
            Error::OverflowGuard { .. } => "overflow guard",
            Error::NonFinite { .. } => "finite field samples",
            Error::PeaksOverlap { .. } => "peak separation",
            Error::DegenerateFit(_) => "positive residuals",
            Error::Io(_) => "writable output",
        }
    }
}
