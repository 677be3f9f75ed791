use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested enumeration exceeds the configured work budget.
    #[error("work budget exceeded: {0}")]
    Budget(String),

    /// A numerical routine did not reach its accuracy target.
    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    /// A Green's function or geometric series that the computation needs is infinite.
    #[error("divergent: {0}")]
    Divergent(String),

    #[error("missing Green's function value G_{d}^{{*{n}}} in table")]
    MissingGreens { d: usize, n: usize },

    /// Allocation failure or a size limit protecting against one.
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
