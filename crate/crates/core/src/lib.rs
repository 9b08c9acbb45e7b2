//! Radial k-plane transforms on the constant-curvature model spaces.

pub mod cli;
pub mod curvature;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod hypergeo;
pub mod lorentz;
pub mod quadrature;
pub mod radial_transform;

pub use curvature::{Curvature, ExtendedRadius};
pub use error::{Error, Result};
pub use geometry::{EmbeddedPoint, Space};
pub use quadrature::{IntegrationResult, QuadratureConfig, QuadratureError};
pub use radial_transform::{PlaneOffset, RadialProfile, TransformValue};
