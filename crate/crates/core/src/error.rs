use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("permutation degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("image sequence is not a bijection on its points")]
    NotABijection,

    #[error("closure exceeded the order cap of {cap}")]
    OrderCapExceeded { cap: usize },

    #[error("element index {0} is out of range for a group of order {1}")]
    ElementOutOfRange(usize, usize),

    #[error("element does not belong to this group")]
    UnknownElement,

    #[error("generator images do not extend to a homomorphism: {0}")]
    IllDefinedHom(String),

    #[error("the given elements do not generate the source group")]
    NonGeneratingDomain,

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("homomorphism is not surjective")]
    NotSurjective,

    #[error("tuple does not generate the group")]
    NotGenerating,

    #[error("tuple length {n} is below the minimal number of generators {d}")]
    TooFewEntries { n: usize, d: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("symbol b{0} lies outside the declared ambient basis")]
    SymbolOutsideBasis(usize),

    #[error("ambient basis too small: need {need} symbols, have {have}")]
    BasisTooSmall { need: usize, have: usize },

    #[error("tuple is not of counterexample shape: {0}")]
    NotCounterexampleShape(String),

    #[error("ambient basis mismatch: {0}")]
    AmbientBasisMismatch(String),

    #[error("{residue} is not a generator of Z/{modulus}")]
    NotAGenerator { residue: String, modulus: String },

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
