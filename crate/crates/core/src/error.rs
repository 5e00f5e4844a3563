use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("count must be at least 1 (got {0})")]
    ZeroCount(usize),

    #[error("alternating series is unstable for n = {0}; use the quadrature form")]
    SeriesUnstable(usize),

    #[error("event index {m} outside support 0..={max}")]
    EventOutOfSupport { m: usize, max: usize },

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("L ≤ N violated: {paths} paths on a {elements}-element IRS")]
    PathsExceedElements { paths: usize, elements: usize },

    #[error("zero distance between endpoints")]
    ZeroDistance,

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("unknown IRS id {0}")]
    UnknownIrs(usize),

    #[error("non-finite channel terms")]
    NonFinite,

    #[error("invalid parameter `{name}`: {reason}")]
    Invalid { name: &'static str, reason: String },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("empty UE list")]
    EmptyUeList,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Invalid {
        name,
        reason: reason.into(),
    }
}
