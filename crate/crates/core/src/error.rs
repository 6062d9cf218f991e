use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime in [2, 65536]")]
    NotPrime(u64),

    #[error("enumeration of {needed} items exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree {d} must be smaller than the characteristic {p}")]
    DegreeTooLarge { d: usize, p: u32 },

    #[error("term is not homogeneous of degree {d}: exponents sum to {sum}")]
    NotHomogeneous { d: usize, sum: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("function is not 1-bounded: |f({index})| = {modulus}")]
    NotBounded { index: usize, modulus: f64 },

    #[error("raw Gowers power has imaginary residue {imag:.3e} (real part {real:.6e}, l = {l})")]
    ImaginaryResidue { real: f64, imag: f64, l: usize },

    #[error("subspace is not contained in the zero set (point {0} fails)")]
    NotInVariety(usize),

    #[error("set is empty")]
    EmptySet,

    #[error("malformed document: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
