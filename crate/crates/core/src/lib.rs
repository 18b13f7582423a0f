//! Moduli spaces of constant mean curvature contours in the 3-sphere.
//!
//! Contours are closed polygons of Hopf-field great-circle arcs. The crate
//! constructs and classifies the Lawson quadrilaterals, parametrizes the
//! rectangular and isosceles pentagon families glued from them, and checks
//! closure numerically against a calibrated quaternion model of S³.

pub mod balancing;
pub mod bisect;
pub mod error;
pub mod export;
pub mod isosceles;
pub mod lawson;
pub mod rectangular;
pub mod s3_oracle;
pub mod verify;

pub use error::{Error, Result};
