use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} out of range for alphabet of size {d}")]
    LetterOutOfRange { letter: u8, d: usize },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("elements belong to different groups (`{0}` vs `{1}`)")]
    MismatchedGroups(String, String),

    #[error("not contracting within bounds: {0}")]
    NotContractingWithinBounds(String),

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("rational point needs a nonempty period")]
    EmptyPeriod,

    #[error("point {point} does not lie in cone {cone}")]
    NotInCone { point: String, cone: String },

    #[error("cones overlap: {0} and {1}")]
    OverlappingCones(String, String),

    #[error("cones cover the whole space")]
    CoveringCones,

    #[error("infeasible refinement: {0}")]
    InfeasibleRefinement(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid element table: {0}")]
    InvalidElement(String),

    #[error("partition does not refine the domain: {0}")]
    NotRefining(String),

    #[error("element does not fix {0}")]
    FixedPointViolation(String),

    #[error("germ signature did not stabilize within {0} steps")]
    NotStabilized(usize),

    #[error("contract violated: {0}")]
    ContractViolation(String),

    #[error("duplicate point {0}")]
    DuplicatePoint(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
