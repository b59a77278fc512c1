use std::fmt;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} of size {size} exceeds the enumeration cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("coalition must be nonempty")]
    EmptyCoalition,
    #[error("player {player} is outside 1..={n}")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("hybrid rule violates the star condition: {detail}")]
    StarViolation {
        first: usize,
        second: Option<usize>,
        detail: String,
    },
    #[error("node labels do not partition the player set: {0}")]
    LabelsNotPartition(String),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    PlayerOutOfRange { player: u64, n: usize },
    DuplicateLiteral(u64),
    EmptyPositive,
    MissingHeader,
    HeaderMismatch { expected: usize, found: usize },
    InvalidRule(String),
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }

    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError::new(line, col, ParseErrorKind::Syntax(msg.into()))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::PlayerOutOfRange { player, n } => {
                write!(f, "player {player} is outside 1..={n}")
            }
            ParseErrorKind::DuplicateLiteral(p) => write!(f, "duplicate literal for player {p}"),
            ParseErrorKind::EmptyPositive => {
                write!(f, "expression needs at least one positive literal")
            }
            ParseErrorKind::MissingHeader => write!(f, "missing 'players: <n>' header"),
            ParseErrorKind::HeaderMismatch { expected, found } => {
                write!(f, "header declares {found} players, expected {expected}")
            }
            ParseErrorKind::InvalidRule(msg) => write!(f, "invalid rule: {msg}"),
        }
    }
}
