use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("z = {0} lies on the cut (1, inf)")]
    OnCut(f64),
    #[error("size guard exceeded: requested {requested}, limit {limit}")]
    SizeGuard { requested: usize, limit: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("no sign change on [{0}, {1}]")]
    NoSignChange(f64, f64),
    #[error("pole proximity: |denominator| = {0:e}")]
    PoleProximity(f64),
    #[error("series route outside its convergence disk (|s|*rho = {0}); use the matrix route")]
    SeriesDivergent(f64),
}

impl Error {
    /// Whether the error stems from bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::InvalidArgument(_) | Error::OnCut(_) | Error::SizeGuard { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
