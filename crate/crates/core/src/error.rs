use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("variable u{index} out of range: only {n} fiber variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("extension class does not vanish on the zero section: {0}")]
    UnsupportedRestriction(String),

    #[error("cohomology changed when the z-window was doubled ({small} vs {large})")]
    WindowUnstable { small: u64, large: u64 },

    #[error("finiteness of H^1 could not be decided: {0}")]
    UndecidedFiniteness(String),

    #[error("width changed when the truncation box was doubled ({small} vs {large})")]
    BoxUnstable { small: u64, large: u64 },

    #[error("closed form and Cech computation disagree: {0}")]
    InternalMismatch(String),

    #[error("line bundle on the chain is not spanned (degree {0} < 0)")]
    NotSpanned(i64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
