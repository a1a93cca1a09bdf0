use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// ∂∘∂ ≠ 0; `degree` is the source degree of the outer composite.
    #[error("boundary composite is nonzero out of degree {degree}")]
    NotAComplex { degree: i64 },

    #[error("k = {k} is outside the cell-model range 1..={k_max}")]
    OutOfRange { k: u32, k_max: u32 },

    #[error("degree {requested} is beyond the exactness bound {bound}")]
    BeyondExactness { requested: i64, bound: i64 },

    #[error("enumeration needs {required} tuples but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("mismatched primes {0} and {1}")]
    PrimeMismatch(u64, u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
