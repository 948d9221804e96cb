use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("invalid size {0}: a quandle needs at least one element")]
    InvalidSize(usize),

    #[error("trace mismatch: tr g = {trace}, expected 2cos r = {expected}")]
    TraceMismatch { trace: f64, expected: f64 },

    #[error("degenerate logarithm: element is ±identity")]
    DegenerateLogarithm,

    #[error("{what} = {value} is outside its domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("mixed radii: expected {expected}, found {found}")]
    MixedRadius { expected: f64, found: f64 },

    #[error("malformed PD code: {0}")]
    MalformedPd(String),

    #[error("inconsistent orientation in PD code: {0}")]
    Orientation(String),

    #[error("empty diagram")]
    EmptyDiagram,

    #[error("unknown knot {name:?}; available: {}", available.join(", "))]
    UnknownKnot {
        name: String,
        available: Vec<&'static str>,
    },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("correspondence violation: relation error {error:e} exceeds bound {bound:e}")]
    CorrespondenceViolation { error: f64, bound: f64 },

    #[error("representation not in R(K, SU(2)): generator {generator} has trace {trace}, expected {expected}")]
    NotInRepresentationSpace {
        generator: usize,
        trace: f64,
        expected: f64,
    },

    #[error("audit failed: {}", clauses.join(", "))]
    AuditFailure { clauses: Vec<String> },
}
