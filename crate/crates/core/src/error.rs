use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in 2..=251")]
    InvalidModulus(u32),

    #[error("residue {value} is out of range for modulus {q}")]
    ResidueOutOfRange { value: u32, q: u16 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("field mismatch: q = {left} vs q = {right}")]
    FieldMismatch { left: u16, right: u16 },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what}: {needed} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("ground set size {0} is outside the supported range 1..=64")]
    GroundSetTooLarge(usize),

    #[error("index {index} is outside [1, {n}]")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("basic sets contain an empty set")]
    EmptySet,

    #[error("sets do not cover [n]; uncovered (1-based): {uncovered:?}")]
    NotACovering { uncovered: Vec<usize> },

    #[error("covering is a {k}-partition, no counterexample exists")]
    IsKPartition { k: usize },

    #[error("matrix is not a weight-preserving map for this covering")]
    NotAnIsometry,

    #[error("isometry does not factor as a covering permutation times a block matrix")]
    NotDecomposable,

    #[error("all basic sets have the same cardinality")]
    NoUnequalSets,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("linear map is not weight-preserving on its source code")]
    NotWeightPreserving,

    #[error("no witness found: {0}")]
    NoWitness(String),
}

pub type Result<T> = std::result::Result<T, Error>;
