use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The p-adic search would exceed its candidate budget.
    #[error(
        "search budget exceeded at p = {p} (modulus reached {modulus}, {evaluated} candidates)"
    )]
    BudgetExceeded {
        p: u64,
        modulus: u128,
        evaluated: u64,
    },

    #[error("factorization budget exceeded for {0}")]
    FactorizationBudget(i128),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    /// A generator ran out of candidates before producing enough items.
    #[error("prime limit exhausted: found {found} of {requested} requested")]
    Exhausted { requested: usize, found: usize },

    #[error("{context}: {source}")]
    Census {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
