use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// What went wrong on a given line of a system file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MalformedHeader(String),
    VertexOutOfRange { vertex: i64, n: usize },
    DuplicateEdge([usize; 3]),
    NotThreeUniform(String),
    EdgeCountMismatch { declared: usize, found: usize },
    TooManyVertices(usize),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MalformedHeader(s) => write!(f, "malformed header: {s}"),
            ParseErrorKind::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range 1..={n}")
            }
            ParseErrorKind::DuplicateEdge([a, b, c]) => write!(f, "duplicate edge {a} {b} {c}"),
            ParseErrorKind::NotThreeUniform(s) => write!(f, "not a 3-uniform edge: {s}"),
            ParseErrorKind::EdgeCountMismatch { declared, found } => {
                write!(f, "header declares {declared} edges but {found} were given")
            }
            ParseErrorKind::TooManyVertices(n) => {
                write!(f, "{n} vertices exceeds the supported maximum of 64")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("unsupported size for {what}: n = {n} exceeds the limit {limit}")]
    UnsupportedSize {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "predicate `{0}` is not hereditary; isomorph-free generation requires closure under edge deletion"
    )]
    NotHereditary(String),

    #[error("search budget of {nodes} nodes exhausted; best lower bound found is {best}")]
    BudgetExceeded { nodes: u64, best: usize },

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, kind }
    }
}
