//! Concrete Hadamard spaces and the convex sets they can project onto.

mod euclidean;
mod half_plane;
mod tree;

pub use euclidean::Euclidean;
pub use half_plane::{hp_distance, HalfPlane, HalfPlanePoint};
pub use tree::{parse_edge_list, MetricTree, TreeEdge, TreePath, TreePoint, TreeSegment};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;

/// A closed convex subset of one of the model spaces.
///
/// `Singleton`, `Ball` and `Segment` make sense in every space; the remaining
/// variants belong to one space only and projecting with the wrong space is a
/// domain error.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet<P> {
    Singleton(P),
    /// Closed metric ball.
    Ball { center: P, radius: f64 },
    /// Geodesic segment between two points.
    Segment(P, P),
    /// Euclidean halfspace `{x : ⟨normal, x⟩ ≤ offset}`.
    Halfspace { normal: DVector<f64>, offset: f64 },
    /// Euclidean affine subspace `origin + span(directions)`.
    Affine {
        origin: DVector<f64>,
        directions: Vec<DVector<f64>>,
    },
    /// Euclidean axis-aligned box `[lower, upper]`.
    Box {
        lower: DVector<f64>,
        upper: DVector<f64>,
    },
    /// Vertex-induced subtree of a metric tree, by vertex label.
    Subtree { vertices: Vec<String> },
}

impl<P> ConvexSet<P> {
    pub fn kind(&self) -> &'static str {
        match self {
            ConvexSet::Singleton(_) => "singleton",
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Segment(..) => "segment",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::Affine { .. } => "affine",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Subtree { .. } => "subtree",
        }
    }
}

/// Projection onto the variants every space supports; `None` for the
/// space-specific ones.
pub(crate) fn project_common<S: HadamardSpace + ?Sized>(
    space: &S,
    set: &ConvexSet<S::Point>,
    x: &S::Point,
) -> Option<Result<S::Point>> {
    match set {
        ConvexSet::Singleton(p) => Some(Ok(p.clone())),
        ConvexSet::Ball { center, radius } => {
            if !(radius.is_finite() && *radius >= 0.0) {
                return Some(Err(Error::domain(format!("invalid ball radius {radius}"))));
            }
            let d = space.distance(center, x);
            Some(Ok(if d <= *radius {
                x.clone()
            } else {
                space.geodesic_point(center, x, *radius)
            }))
        }
        _ => None,
    }
}

pub(crate) fn mismatch<P>(space: &str, set: &ConvexSet<P>) -> Error {
    Error::domain(format!(
        "convex set `{}` is not supported in the {space} space",
        set.kind()
    ))
}

/// Nearest point of `set` to `x`; thin wrapper over [`HadamardSpace::project`].
pub fn project_convex<S: HadamardSpace + ?Sized>(
    space: &S,
    set: &ConvexSet<S::Point>,
    x: &S::Point,
) -> Result<S::Point> {
    space.project(set, x)
}
