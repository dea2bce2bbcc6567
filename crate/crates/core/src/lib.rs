//! Lengthening deformations of singular hyperbolic one-holed tori.
//!
//! A torus is described by a Markoff map `Φ` on the complementary regions of
//! the Farey tree. The infinitesimal deformations that lengthen every simple
//! closed geodesic form a convex cone; its projectivization is a convex
//! polygon with one side per slope. This crate computes that polygon, its
//! asymptotic shape and its degenerate limits.

pub mod asymptotics;
pub mod degenerate;
pub mod error;
pub mod farey;
pub mod markoff;
pub mod polygon;
pub mod real;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use farey::Slope;
pub use markoff::{Classification, HalfTraceCoords, MarkoffMap, MarkoffTriple, Mode};
pub use real::Real;
