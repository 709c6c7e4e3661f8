use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant except
/// [`Error::Parse`] to the "semantic precondition" exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bounding functional is not strictly positive on the cone")]
    UnboundedRegion,
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("monoid is not sharp: its cone contains a line")]
    NotSharp,
    #[error("monoid is not saturated")]
    NotSaturated,
    #[error("homomorphism is not injective on groups or ranks differ; cokernel is infinite")]
    InfiniteCokernel,
    #[error("matrix does not map generator {0} into the target monoid")]
    NotAHomomorphism(usize),
    #[error("vector {0} does not lie in the expected lattice or monoid")]
    NotInLattice(String),
    #[error("incompatible profinite family: {0}")]
    IncompatibleFamily(String),
    #[error("input sequence is not exact: {0}")]
    NotExactInput(String),
    #[error("modules live over different graded algebras")]
    AlgebraMismatch,
    #[error("minimal generator {0} lies in the outer margin of the truncation region")]
    RegionTooSmall(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("{0} does not divide {1}")]
    NotADivisor(u64, u64),
    #[error("{1} is not a multiple of {0}")]
    NotAMultiple(u64, u64),
    #[error("invalid graded module: {0}")]
    InvalidModule(String),
    #[error("invalid parabolic sheaf: {0}")]
    InvalidSheaf(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("integer overflow in lattice coordinates")]
    Overflow,
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
