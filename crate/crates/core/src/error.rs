use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatmaxError {
    #[error("element id {id} out of range for a poset with {size} elements")]
    ElementOutOfRange { id: usize, size: usize },
    #[error("poset has {size} elements, at most {max} are supported")]
    TooManyElements { size: usize, max: usize },
    #[error("order relations contain a cycle through element {0}")]
    Cycle(usize),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("domain too large: {region} has more than {limit} points")]
    DomainTooLarge { region: String, limit: u64 },
    #[error("element set is not an ideal: element {element} is present but {missing} below it is not")]
    NotAnIdeal { element: usize, missing: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("infeasible solution: {0}")]
    Infeasible(String),
}

pub type Result<T, E = LatmaxError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> LatmaxError {
    LatmaxError::InvalidParameter(msg.into())
}
