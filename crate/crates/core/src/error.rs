use num_complex::Complex64;
use thiserror::Error;

use crate::analytic::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// An expression produced a non-finite value (pole, log of zero, overflow).
    #[error("evaluation singularity at z = {z}: {detail}")]
    Singularity { z: Complex64, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("phi is not a self-map of the disk: |phi({witness})| = {modulus}")]
    NotSelfMap { witness: Complex64, modulus: f64 },

    #[error("symbol `{symbol}` is not holomorphic on the disk: {detail} near z = {witness}")]
    NotHolomorphic {
        symbol: String,
        detail: String,
        witness: Complex64,
    },

    #[error("operator is not continuous ({0}); essential norm is undefined")]
    Divergent(String),
}

impl Error {
    /// Refusals are user-facing validation outcomes rather than internal failures.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::NotSelfMap { .. } | Error::NotHolomorphic { .. } | Error::Divergent(_)
        )
    }
}
