use thiserror::Error;

use crate::elca::ElcaMorphism;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("symbol error: {0}")]
    Symbol(String),
    #[error("product of two symbols is outside the scalar space")]
    SymbolProduct,
    #[error("missing shadow value for symbol `{0}`")]
    MissingShadow(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid morphism entry: {0}")]
    Entry(String),
    #[error("not representable with the declared scalars: {0}")]
    Unrepresentable(String),
    #[error("no lift exists: {0}")]
    NoLift(String),
    #[error("square does not commute")]
    NonCommuting,
    /// Carries the embedding of the nonzero kernel.
    #[error("differential is not monic; kernel {}", kernel.source())]
    NotMonic { kernel: Box<ElcaMorphism> },
    #[error("object is not a ghost (differential not epic)")]
    NotGhost,
    #[error("upper group is not discrete")]
    UpperNotDiscrete,
    #[error("group is not precompact")]
    NotPrecompact,
    #[error("invalid certificate at square {square}: {reason}")]
    InvalidCertificate { square: usize, reason: String },
    #[error("common refinement is not a monic complex")]
    RefinementNotGhost,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("order bound exceeded: {0}")]
    OrderBound(String),
    #[error("object is outside the supported part of the left heart: {0}")]
    OutsideLeftHeart(String),
    #[error("json: {0}")]
    Json(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
