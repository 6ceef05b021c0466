use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Position inside an expression, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: Pos, msg: String },

    #[error("{0}")]
    Input(String),

    #[error("unbound slot {0}")]
    UnboundSlot(String),

    #[error("unknown family {0}")]
    UnknownFamily(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain mismatch: half-domain sizes {left} and {right}")]
    DomainMismatch { left: usize, right: usize },

    #[error("mirror property violated: {0}")]
    Mirror(String),

    #[error("oracle budget exceeded: {needed} work units requested, budget is {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("gram matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("verification failed: {0}")]
    Mismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::UnboundSlot(_) | Error::UnknownFamily(_) => 2,
            Error::Dimension(_) => 3,
            Error::Budget { .. } => 4,
            Error::Mismatch(_) => 5,
            _ => 1,
        }
    }

    pub(crate) fn parse(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
