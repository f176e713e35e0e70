//! Convex functions, proximal mappings and monotone vector fields.

pub mod diagnostics;
mod field;
pub mod solver;

pub use diagnostics::{
    firm_nonexpansive_slack, firm_nonspread_gap, graph_monotonicity_gap, local_residual_ratio,
    monotonicity_gap, moreau_objective, prox_optimality_gap, resolvent_comparison_gap,
    resolvent_identity_residual,
};
pub use field::{resolvent, resolvent_pair, selection, EuclideanMap, VectorField};

use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::spaces::ConvexSet;
use solver::DistanceTerm;

/// A proper, lower semicontinuous, geodesically convex function given by
/// one of a few shapes with known proximal behaviour.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFunction<P> {
    /// `ρ(·, q)`
    DistanceTo(P),
    /// `½ρ(·, q)²`
    HalfSquaredDistanceTo(P),
    /// `0` on the set, `+∞` off it.
    IndicatorOf(ConvexSet<P>),
    /// `Σ wᵢ fᵢ` with `wᵢ ≥ 0`; the empty sum is the zero function.
    WeightedSum(Vec<(f64, ConvexFunction<P>)>),
}

/// How `prox` evaluates a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxCapability {
    ClosedForm,
    GenericSolver,
}

impl<P: Clone> ConvexFunction<P> {
    pub fn zero() -> Self {
        ConvexFunction::WeightedSum(Vec::new())
    }

    /// Checks weights and embedded points against `space`.
    pub fn validate<S: HadamardSpace<Point = P> + ?Sized>(&self, space: &S) -> Result<()> {
        match self {
            ConvexFunction::DistanceTo(q) | ConvexFunction::HalfSquaredDistanceTo(q) => {
                space.validate(q)
            }
            // Space-specific descriptors are checked when first projected onto.
            ConvexFunction::IndicatorOf(set) => match set {
                ConvexSet::Singleton(p) | ConvexSet::Ball { center: p, .. } => space.validate(p),
                ConvexSet::Segment(a, b) => {
                    space.validate(a)?;
                    space.validate(b)
                }
                _ => Ok(()),
            },
            ConvexFunction::WeightedSum(terms) => {
                for (w, f) in terms {
                    if !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::domain(format!("weight {w} must be nonnegative")));
                    }
                    f.validate(space)?;
                }
                Ok(())
            }
        }
    }

    pub fn evaluate<S: HadamardSpace<Point = P> + ?Sized>(&self, space: &S, x: &P) -> Result<f64> {
        Ok(match self {
            ConvexFunction::DistanceTo(q) => space.distance(x, q),
            ConvexFunction::HalfSquaredDistanceTo(q) => {
                let d = space.distance(x, q);
                0.5 * d * d
            }
            ConvexFunction::IndicatorOf(set) => {
                if space.contains(set, x)? {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexFunction::WeightedSum(terms) => {
                let mut total = 0.0;
                for (w, f) in terms {
                    // 0·∞ is taken as 0.
                    if *w > 0.0 {
                        total += w * f.evaluate(space, x)?;
                    }
                }
                total
            }
        })
    }

    pub fn prox_capability(&self) -> ProxCapability {
        match self {
            ConvexFunction::WeightedSum(terms) => {
                let active: Vec<_> = terms.iter().filter(|(w, _)| *w > 0.0).collect();
                match active.as_slice() {
                    [] => ProxCapability::ClosedForm,
                    [(_, f)] => f.prox_capability(),
                    _ => ProxCapability::GenericSolver,
                }
            }
            _ => ProxCapability::ClosedForm,
        }
    }

    fn has_indicator(&self) -> bool {
        match self {
            ConvexFunction::IndicatorOf(_) => true,
            ConvexFunction::WeightedSum(terms) => terms.iter().any(|(_, f)| f.has_indicator()),
            _ => false,
        }
    }

    /// Centers of the distance terms, where the function may fail to be
    /// smooth.
    pub fn anchors(&self) -> Vec<P>
    where
        P: Clone,
    {
        match self {
            ConvexFunction::DistanceTo(q) | ConvexFunction::HalfSquaredDistanceTo(q) => vec![q.clone()],
            ConvexFunction::IndicatorOf(_) => Vec::new(),
            ConvexFunction::WeightedSum(terms) => terms.iter().flat_map(|(_, f)| f.anchors()).collect(),
        }
    }

    /// Appends the terms of `factor·f` when `f` is a nonnegative combination
    /// of distance-type terms; `false` otherwise.
    fn distance_terms(&self, factor: f64, out: &mut Vec<DistanceTerm<P>>) -> bool
    where
        P: Clone,
    {
        match self {
            ConvexFunction::DistanceTo(q) => out.push(DistanceTerm { weight: factor, squared: false, anchor: q.clone() }),
            ConvexFunction::HalfSquaredDistanceTo(q) => {
                out.push(DistanceTerm { weight: factor, squared: true, anchor: q.clone() })
            }
            ConvexFunction::IndicatorOf(_) => return false,
            ConvexFunction::WeightedSum(terms) => {
                return terms.iter().all(|(w, g)| g.distance_terms(factor * w, out));
            }
        }
        true
    }

    /// Largest distance from `x` to a point named by the function; used as
    /// the initial search radius of the generic solver.
    fn length_scale<S: HadamardSpace<Point = P> + ?Sized>(&self, space: &S, x: &P) -> f64 {
        match self {
            ConvexFunction::DistanceTo(q) | ConvexFunction::HalfSquaredDistanceTo(q) => {
                space.distance(x, q)
            }
            ConvexFunction::IndicatorOf(_) => 0.0,
            ConvexFunction::WeightedSum(terms) => terms
                .iter()
                .map(|(_, f)| f.length_scale(space, x))
                .fold(0.0, f64::max),
        }
    }
}

/// The unique minimizer of `f(·) + ρ(·, x)²/(2λ)`.
pub fn prox<S: HadamardSpace + ?Sized>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    lambda: f64,
    x: &S::Point,
) -> Result<S::Point> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("prox parameter λ = {lambda} must be positive")));
    }
    match f {
        ConvexFunction::DistanceTo(q) => {
            let d = space.distance(x, q);
            Ok(space.geodesic_point(x, q, lambda.min(d)))
        }
        ConvexFunction::HalfSquaredDistanceTo(q) => {
            let d = space.distance(x, q);
            Ok(space.geodesic_point(x, q, lambda * d / (1.0 + lambda)))
        }
        ConvexFunction::IndicatorOf(set) => space.project(set, x),
        ConvexFunction::WeightedSum(terms) => {
            let active: Vec<_> = terms.iter().filter(|(w, _)| *w > 0.0).collect();
            match active.as_slice() {
                [] => Ok(x.clone()),
                [(w, g)] => prox(space, g, lambda * w, x),
                _ if f.has_indicator() => Err(Error::Unsupported(
                    "prox of a weighted sum containing an indicator".into(),
                )),
                _ => generic_prox(space, f, lambda, x, x),
            }
        }
    }
}

/// [`prox`] with an explicit starting point for the iterative solvers.
/// Closed forms ignore `start`.
pub fn prox_from<S: HadamardSpace + ?Sized>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    lambda: f64,
    x: &S::Point,
    start: &S::Point,
) -> Result<S::Point> {
    match f {
        ConvexFunction::WeightedSum(terms)
            if terms.iter().filter(|(w, _)| *w > 0.0).count() > 1 && !f.has_indicator() =>
        {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::domain(format!("prox parameter λ = {lambda} must be positive")));
            }
            generic_prox(space, f, lambda, x, start)
        }
        _ => prox(space, f, lambda, x),
    }
}

fn generic_prox<S: HadamardSpace + ?Sized>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    lambda: f64,
    x: &S::Point,
    start: &S::Point,
) -> Result<S::Point> {
    let mut terms = vec![DistanceTerm { weight: 1.0 / lambda, squared: true, anchor: x.clone() }];
    if f.distance_terms(1.0, &mut terms) {
        if let Some(z) = solver::minimize_distance_sum(space, &terms, start)? {
            return Ok(z);
        }
    }
    let objective = |y: &S::Point| moreau_objective(space, f, lambda, x, y).unwrap_or(f64::INFINITY);
    let scale = f.length_scale(space, x).max(1e-3);
    let mut hints = f.anchors();
    hints.push(x.clone());
    space.minimize_convex(&objective, start, scale, &hints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Euclidean, HalfPlane, HalfPlanePoint, MetricTree};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn closed_form_examples() {
        let r1 = Euclidean::new(1);
        let f = ConvexFunction::HalfSquaredDistanceTo(v(&[0.]));
        // (x + λq)/(1 + λ)
        assert_abs_diff_eq!(prox(&r1, &f, 1.0, &v(&[2.])).unwrap()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(prox(&r1, &f, 3.0, &v(&[-8.])).unwrap()[0], -2.0, epsilon = 1e-15);

        let g = ConvexFunction::DistanceTo(v(&[0.]));
        assert_abs_diff_eq!(prox(&r1, &g, 0.5, &v(&[2.])).unwrap()[0], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(prox(&r1, &g, 5.0, &v(&[2.])).unwrap()[0], 0.0, epsilon = 1e-15);

        assert!(prox(&r1, &g, 0.0, &v(&[2.])).is_err());
        assert!(prox(&r1, &g, -1.0, &v(&[2.])).is_err());
    }

    #[test]
    fn prox_fixes_minimizers() {
        let hp = HalfPlane;
        let q = HalfPlanePoint::new(0.4, 2.0);
        for f in [
            ConvexFunction::DistanceTo(q),
            ConvexFunction::HalfSquaredDistanceTo(q),
        ] {
            assert_eq!(prox(&hp, &f, 0.7, &q).unwrap(), q);
        }
    }

    #[test]
    fn tree_soft_threshold_reaches_leaf() {
        let t = MetricTree::from_edge_list("c a 2\nc b 3\n").unwrap();
        let b = t.vertex("b").unwrap();
        let f = ConvexFunction::DistanceTo(b);
        for x in [t.vertex("a").unwrap(), t.vertex("c").unwrap(), t.point_on_edge(0, 0.5).unwrap()] {
            assert_eq!(prox(&t, &f, 100.0, &x).unwrap(), b);
        }
    }

    #[test]
    fn indicator_values() {
        let r2 = Euclidean::new(2);
        let f = ConvexFunction::IndicatorOf(ConvexSet::Halfspace {
            normal: v(&[0., 1.]),
            offset: 0.0,
        });
        assert_eq!(f.evaluate(&r2, &v(&[1., -1.])).unwrap(), 0.0);
        assert_eq!(f.evaluate(&r2, &v(&[1., 1.])).unwrap(), f64::INFINITY);
        let scaled = ConvexFunction::WeightedSum(vec![(0.0, f.clone())]);
        assert_eq!(scaled.evaluate(&r2, &v(&[1., 1.])).unwrap(), 0.0);
    }

    #[test]
    fn weighted_sum_in_euclidean_matches_grid_oracle() {
        let r2 = Euclidean::new(2);
        let a = v(&[1.0, 0.0]);
        let b = v(&[-1.0, 1.0]);
        let f = ConvexFunction::WeightedSum(vec![
            (1.0, ConvexFunction::DistanceTo(a.clone())),
            (0.5, ConvexFunction::HalfSquaredDistanceTo(b.clone())),
        ]);
        let x = v(&[0.5, 2.0]);
        let lambda = 0.8;
        let p = prox(&r2, &f, lambda, &x).unwrap();
        assert_eq!(f.prox_capability(), ProxCapability::GenericSolver);

        // Brute-force oracle: nested grid refinement over the objective.
        let obj = |y: &DVector<f64>| {
            (y - &a).norm() + 0.25 * (y - &b).norm_squared() + (y - &x).norm_squared() / (2.0 * lambda)
        };
        let (mut cx, mut cy, mut h) = (0.0, 0.0, 1.0);
        for _ in 0..40 {
            let mut best = (f64::INFINITY, cx, cy);
            for i in -20..=20 {
                for j in -20..=20 {
                    let y = v(&[cx + h * i as f64 / 10.0, cy + h * j as f64 / 10.0]);
                    let val = obj(&y);
                    if val < best.0 {
                        best = (val, y[0], y[1]);
                    }
                }
            }
            cx = best.1;
            cy = best.2;
            h *= 0.5;
        }
        assert!((p[0] - cx).abs() < 1e-6 && (p[1] - cy).abs() < 1e-6, "{p} vs ({cx}, {cy})");
        assert!(obj(&p) <= obj(&v(&[cx, cy])) + 1e-12);
    }

    #[test]
    fn weighted_sum_on_tree_matches_edge_scan() {
        let t = MetricTree::from_edge_list("r a 1\nr b 2\nb c 1.5\nb d 0.5\n").unwrap();
        let a = t.vertex("a").unwrap();
        let c = t.vertex("c").unwrap();
        let f = ConvexFunction::WeightedSum(vec![
            (1.0, ConvexFunction::HalfSquaredDistanceTo(a)),
            (2.0, ConvexFunction::DistanceTo(c)),
        ]);
        let x = t.vertex("d").unwrap();
        let p = prox(&t, &f, 0.6, &x).unwrap();
        let obj = |y: &_| moreau_objective(&t, &f, 0.6, &x, y).unwrap();
        let mut best = f64::INFINITY;
        for (i, e) in t.edges().iter().enumerate() {
            for k in 0..=10_000 {
                let y = t.point_on_edge(i, e.length * k as f64 / 10_000.0).unwrap();
                best = best.min(obj(&y));
            }
        }
        assert!(obj(&p) <= best + 1e-12);
        assert!(obj(&p) >= best - 1e-6);
    }

    #[test]
    fn weighted_sum_with_indicator_is_unsupported() {
        let r1 = Euclidean::new(1);
        let f = ConvexFunction::WeightedSum(vec![
            (1.0, ConvexFunction::DistanceTo(v(&[0.]))),
            (
                1.0,
                ConvexFunction::IndicatorOf(ConvexSet::Ball {
                    center: v(&[3.]),
                    radius: 1.0,
                }),
            ),
        ]);
        assert!(matches!(prox(&r1, &f, 1.0, &v(&[5.])), Err(Error::Unsupported(_))));
        // a single indicator term is still a projection
        let g = ConvexFunction::WeightedSum(vec![(
            2.0,
            ConvexFunction::IndicatorOf(ConvexSet::Ball {
                center: v(&[3.]),
                radius: 1.0,
            }),
        )]);
        assert_eq!(prox(&r1, &g, 1.0, &v(&[7.])).unwrap(), v(&[4.]));
        assert_eq!(prox(&r1, &ConvexFunction::zero(), 1.0, &v(&[7.])).unwrap(), v(&[7.]));
    }
}
