//! Seeded random points, trees and problem data for property checks.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::geometry::HadamardSpace;
use crate::spaces::{Euclidean, HalfPlane, HalfPlanePoint, MetricTree, TreePoint};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream for job `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// A space with a reference distribution on its points.
pub trait PointSampler: HadamardSpace {
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
}

impl PointSampler for Euclidean {
    /// Standard Gaussian coordinates.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_fn(self.dim(), |_, _| rng.sample(StandardNormal))
    }
}

impl PointSampler for HalfPlane {
    /// `a ~ N(0, 1)`, `b = exp(N(0, 0.75²))`.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> HalfPlanePoint {
        let height = Normal::<f64>::new(0.0, 0.75).expect("valid normal");
        HalfPlanePoint::new(rng.sample(StandardNormal), height.sample(rng).exp())
    }
}

impl PointSampler for MetricTree {
    /// A vertex with probability ¼, otherwise a uniform edge and a uniform
    /// offset along it.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> TreePoint {
        if rng.random_bool(0.25) {
            return TreePoint::Vertex(rng.random_range(0..self.vertex_count()));
        }
        let edge = rng.random_range(0..self.edges().len());
        let offset = rng.random::<f64>() * self.edges()[edge].length;
        self.point_on_edge(edge, offset).expect("offset within edge")
    }
}

/// A random recursive tree on `vertices ≥ 2` vertices labelled `v0, v1, …`,
/// with edge lengths uniform in `[0.5, 2]`.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, vertices: usize) -> MetricTree {
    let n = vertices.max(2);
    let edges: Vec<(String, String, f64)> = (1..n)
        .map(|k| {
            let parent = rng.random_range(0..k);
            (format!("v{parent}"), format!("v{k}"), rng.random_range(0.5..=2.0))
        })
        .collect();
    MetricTree::from_edges(edges).expect("random tree is valid")
}

/// A uniform value in `[lo, hi]` on a logarithmic scale.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// A random matrix with positive semidefinite symmetric part: a skew part
/// plus `BᵀB/n`.
pub fn monotone_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = |rng: &mut R| -> f64 { rng.sample(StandardNormal) };
    let b = DMatrix::from_fn(n, n, |_, _| g(rng));
    let k = DMatrix::from_fn(n, n, |_, _| g(rng));
    (b.transpose() * &b) / n as f64 + (&k - k.transpose()) * 0.5
}
