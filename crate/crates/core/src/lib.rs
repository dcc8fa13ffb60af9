//! Mirror bodies invisible from a point.
//!
//! An ellipse and a confocal hyperbola whose intersections lie on the
//! vertical lines through the foci bound a pair of curvilinear triangles.
//! Together with their dilate about the left focus `F1`, they form a body
//! such that every billiard trajectory leaving `F1` (up to a null set of
//! directions) returns to its initial ray after four reflections.
//!
//! The geometry is generic over the scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`, which all quoted tolerances
//! assume.

// `!(x < y)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod conics;
pub mod document;
pub mod error;
pub mod geom;
pub mod invisibility;
pub mod scalar;
pub mod symmetry3d;
pub mod theory;
pub mod tracer;

pub use error::{DocumentError, GeometryError};
pub use scalar::Real;

pub type Pair = conics::ConfocalPair<f64>;
pub type Body = body::Body2D<f64>;
pub type Point = geom::Point2<f64>;
pub type Trajectory = tracer::Trajectory<f64>;
