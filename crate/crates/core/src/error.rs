use thiserror::Error;

use crate::dynamics::Classification;
use crate::dynamics::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a scalar function.
    #[error("{function}: argument {value} outside domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid {field} = {value}: must be {bound}")]
    Validation {
        field: &'static str,
        value: f64,
        bound: &'static str,
    },

    #[error("config line {line}: cannot parse key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Point-charge Coulomb energy evaluated at zero separation.
    #[error("classical Coulomb energy is singular at x = 0")]
    Singularity,

    /// The antisymmetrised two-particle state is numerically null here.
    #[error("near-null triplet state: |alpha|^2 = {alpha_sq:e} is below the guard {guard:e}")]
    Guard { alpha_sq: f64, guard: f64 },

    #[error("combined exponent {exponent} exceeds the representable range")]
    NumericalRange { exponent: f64 },

    #[error("step size {step:e} fell below the floor at t = {t}, x = {x}, p = {p}")]
    Stiffness { t: f64, x: f64, p: f64, step: f64 },

    /// An energy evaluation failed part-way through an integration.
    #[error("integration aborted at t = {}: {source}", partial.samples.last().map_or(0.0, |s| s.t))]
    Aborted {
        #[source]
        source: Box<Error>,
        partial: Box<Trajectory>,
    },

    #[error("invalid bracket: p_lo = {p_lo} is {lo:?}, p_hi = {p_hi} is {hi:?}")]
    Bracket {
        p_lo: f64,
        p_hi: f64,
        lo: Classification,
        hi: Classification,
    },
}

impl Error {
    /// Failures of the numerics, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singularity
            | Error::Guard { .. }
            | Error::NumericalRange { .. }
            | Error::Stiffness { .. } => true,
            Error::Aborted { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
