//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("unknown convention {0:?}, expected A or B")]
    ParseConvention(String),

    #[error("weight has {got} coordinates, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("weight is not dominant: {0}")]
    NotDominant(String),

    #[error("operation requires even parity, weight is odd")]
    OddParity,

    #[error("weight order is only defined for nonnegative last coordinates: {0}")]
    NegativeLastCoordinate(String),

    #[error("weights have mismatched rank or parity")]
    WeightMismatch,

    #[error("invalid irreducible label for O({n}): {reason}")]
    InvalidIrrep { n: usize, reason: String },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not orthogonal with respect to the given form")]
    NotOrthogonal,

    #[error("matrix has infinite order or order certification failed: {0}")]
    NotFiniteOrder(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("group fails validation: {0}")]
    InvalidGroup(String),

    #[error(
        "non-integral multiplicity {value} for tau {tau} at nu {nu} (residual {residual:e})"
    )]
    NonIntegralMultiplicity {
        tau: String,
        nu: String,
        value: f64,
        residual: f64,
    },

    #[error("negative multiplicity {value} reconstructed for sigma {sigma} at nu {nu}")]
    NegativeMultiplicity {
        sigma: String,
        nu: String,
        value: i64,
    },

    #[error("inconsistent spectra: sigma {sigma} at nu {nu} determined as both {a} and {b}")]
    InconsistentReconstruction {
        sigma: String,
        nu: String,
        a: i64,
        b: i64,
    },

    #[error("lattice enumeration exceeded {cap} points; lower the cutoff")]
    EnumerationTooLarge { cap: usize },

    #[error("cutoffs are insufficient: {0}")]
    CutoffInsufficiency(String),

    #[error("spectra provider has no data for {0}")]
    ProviderGap(String),

    #[error("search family too large: {got} candidates exceed cap {cap}")]
    FamilyTooLarge { got: usize, cap: usize },

    #[error("manifest error: {0}")]
    Manifest(String),
}
