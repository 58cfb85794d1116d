//! Planar convex geometry and Lagrangian products K x T: EHZ capacity,
//! systolic ratios, equality cases, normal forms, Minkowski billiards and
//! minimal hulls of translates.

pub mod capacity;
pub mod covering;
pub mod dynamics;
pub mod equality_cases;
pub mod geom2d;
pub mod io;
pub mod symplecto;

pub use capacity::{ehz_capacity, systolic_report, CapacityResult, SystolicReport};
pub use geom2d::{ConvexPolygon, Mat2, Vec2};
