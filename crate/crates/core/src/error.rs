use thiserror::Error;

/// Errors raised by the geometry, orbit and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: |cz + d| = {0:e} is below the pole threshold")]
    Pole(f64),
    #[error("degenerate Möbius coefficients (ad - bc = 0)")]
    Degenerate,
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("image point {0} is not inside the codomain")]
    BoundaryProximity(String),
    #[error("branch error: {0} lies on the cut of the inverse chart")]
    Branch(String),
    #[error("overflow while evaluating index {0}")]
    Overflow(usize),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("arc constraint violated: {0}")]
    ArcConstraint(String),
    #[error("precision exhausted at step {step}: error bound {bound:e} turns exceeds 2^-32 (used {bits} bits)")]
    PrecisionExhausted { step: usize, bound: f64, bits: u32 },
    #[error("map does not preserve the unit circle: {0}")]
    NotCirclePreserving(String),
    #[error("evaluation paths disagree at step {step}: difference {diff:e} exceeds bound {bound:e}")]
    PathDisagreement { step: usize, diff: f64, bound: f64 },
    #[error("walk did not terminate within {0} steps")]
    NonConvergence(u64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("derivative unavailable for {0}")]
    DerivativeUnavailable(String),
    #[error("Denjoy-Wolff set undefined: {0}")]
    DwUndefined(String),
    #[error("sequence {0} carries no interval ledger")]
    LedgerMissing(String),
    #[error("sign loss at index {index}: y = {value:e}")]
    SignLoss { index: usize, value: f64 },
    #[error("excluded point: {0}")]
    ExcludedPoint(String),
    #[error("bad sequence id {id:?}: {reason}")]
    BadSequenceId { id: String, reason: String },
    #[error("arc set too large: {0} segments")]
    TooManyArcs(usize),
}

impl Error {
    /// True for errors caused by running out of floating-point headroom.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. }
                | Error::Overflow(_)
                | Error::PathDisagreement { .. }
                | Error::NonConvergence(_)
                | Error::Pole(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
