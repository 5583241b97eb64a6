use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HsolvError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("empty operator expression")]
    EmptyInput,
    #[error("degree {0} out of range")]
    DegreeOutOfRange(usize),
    #[error("operator degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("operator is not generic: {0}")]
    NonGeneric(String),
    #[error("root finder did not converge after {0} iterations")]
    RootsNotConverged(usize),
    #[error("root methods disagree by {0:e}")]
    RootsDisagree(f64),
    #[error("repeated roots (gap {0:e})")]
    RepeatedRoots(f64),
    #[error("coefficient table residual at t^{a} d^{b} in grade {l}")]
    TableResidual { l: usize, a: usize, b: usize },
    #[error("Q_j is undefined at t = 0")]
    ZeroT,
    #[error("root ordering violated: {0}")]
    Ordering(String),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("bound violated: {0}")]
    BoundViolation(String),
    #[error("loss of independence: {0}")]
    Independence(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, HsolvError>;
