use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Work would exceed a hard enumeration limit.
    #[error("capacity exceeded: {what} with d = {d} (limit {limit}; cost {cost})")]
    Capacity {
        what: &'static str,
        d: usize,
        limit: usize,
        cost: String,
    },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("covariance not full rank: {0}")]
    NotFullRank(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("missing conditional sampler: {0}")]
    MissingSampler(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn capacity(what: &'static str, d: usize, limit: usize, cost: impl Into<String>) -> Self {
        Error::Capacity {
            what,
            d,
            limit,
            cost: cost.into(),
        }
    }
}
