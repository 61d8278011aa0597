use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field spec: modulus is zero")]
    ZeroModulus,
    #[error("invalid field spec: {0}")]
    InvalidField(String),
    #[error("field elements belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("packed kernel needs {needed} slot bits but the budget is {budget}")]
    SlotBudget { needed: usize, budget: usize },
    #[error("invalid packed kernel spec: {0}")]
    InvalidKernel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("batch of {len} updates exceeds capacity {cap}")]
    BatchTooLarge { len: usize, cap: usize },
    #[error("buffer filled while the previous flush was still running ({remaining} steps left); quantum {quantum} is too small")]
    FlushOverrun { remaining: u64, quantum: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
