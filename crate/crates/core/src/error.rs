use thiserror::Error;

use crate::quadrature::QuadratureError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An embedded point does not satisfy the model-space constraint.
    #[error("point is off the model manifold: {0}")]
    OffManifold(String),

    /// The weighted L^{p,1} -> L^inf endpoint does not exist for this (curvature, k).
    #[error("unsupported endpoint: no boundedness estimate exists for curvature {curvature} with k = {k}")]
    UnsupportedEndpoint { curvature: i8, k: usize },

    /// A profile or set has no support, so a ratio against its norm is undefined.
    #[error("empty support: {0}")]
    EmptySupport(String),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
