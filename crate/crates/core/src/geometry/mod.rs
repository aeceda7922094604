//! Convex hulls, axis-aligned boxes, region classification and the
//! topological relation matrix between two point clouds.
//!
//! Space around a cloud is split into its hull interior, the hull boundary
//! and the exterior. Relations between two clouds are derived from which of
//! those regions the points of the other cloud fall into.

mod aabb;
mod hull;
mod model;
mod point;
mod relate;

pub use aabb::{compute_aabb, Aabb};
pub use hull::{classify_point, compute_convex_hull, ConvexHull};
pub use model::ObjectModel;
pub use point::{Plane, Point3};
pub use relate::{
    point_hull_distance, point_triangle_distance, relation_matrix, relation_matrix_tol, surface_gap, touch,
    touch_from_matrix, RelMatrix,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point cloud is degenerate ({0})")]
    DegenerateCloud(&'static str),
    #[error("point cloud contains a non-finite coordinate")]
    NonFinite,
}

/// Position of a point relative to a closed convex region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionClass {
    Interior,
    Boundary,
    Exterior,
}

impl RegionClass {
    /// Interior or boundary (the closure of the region).
    pub fn in_closure(self) -> bool {
        !matches!(self, RegionClass::Exterior)
    }
}
