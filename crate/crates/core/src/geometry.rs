//! Space-agnostic CAT(0) primitives.
//!
//! Everything here is written against [`HadamardSpace`], the contract a model
//! space implements: a metric, unit-speed geodesics, and optionally exact
//! angles and metric projections. The free functions are the metric surrogates
//! of linear-algebra notions (quasilinearization for inner products, comparison
//! and Alexandrov angles for angles between vectors) together with gap
//! diagnostics for the standard CAT(0) inequalities.

use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::spaces::ConvexSet;
use crate::tolerance::{ALEXANDROV_MAX_REFINEMENTS, EPS_ANGLE};

/// A complete CAT(0) space with computable geodesics.
///
/// Implementations must satisfy the metric axioms and the geodesic contract:
/// `geodesic_point(x, y, 0) == x`, `geodesic_point(x, y, d) == y` with
/// `d = distance(x, y)`, and `distance(γ(s), γ(t)) == |s - t|`.
pub trait HadamardSpace: Send + Sync {
    type Point: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn name(&self) -> &'static str;

    /// Metric resolution used for degenerate-case detection and gap checks.
    fn tolerance(&self) -> f64;

    /// Checks that `p` is a valid point of this space.
    fn validate(&self, p: &Self::Point) -> Result<()>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// The point at arclength `s` from `x` along the geodesic to `y`.
    /// `s` is clamped to `[0, distance(x, y)]`.
    fn geodesic_point(&self, x: &Self::Point, y: &Self::Point, s: f64) -> Self::Point;

    /// A point beyond `through` on some geodesic starting at `from` and
    /// passing through `through`, at distance at most `t` past `through`.
    ///
    /// Returns `None` when no geodesic from `from` can be extended past
    /// `through` (a leaf of a tree) or when `from == through`.
    fn extend_geodesic(
        &self,
        from: &Self::Point,
        through: &Self::Point,
        t: f64,
    ) -> Option<Self::Point>;

    /// Closed-form Alexandrov angle at `p` between the geodesics to `x` and
    /// `y`, for `p != x` and `p != y`.
    fn exact_angle(
        &self,
        _p: &Self::Point,
        _x: &Self::Point,
        _y: &Self::Point,
    ) -> Option<f64> {
        None
    }

    /// Metric projection onto a supported closed convex set.
    fn project(&self, set: &ConvexSet<Self::Point>, x: &Self::Point) -> Result<Self::Point>;

    fn contains(&self, set: &ConvexSet<Self::Point>, x: &Self::Point) -> Result<bool> {
        let px = self.project(set, x)?;
        Ok(self.distance(&px, x) <= self.tolerance())
    }

    /// Affine coordinates, available only for Euclidean spaces.
    fn coordinates(&self, _p: &Self::Point) -> Option<DVector<f64>> {
        None
    }

    fn from_coordinates(&self, _v: &DVector<f64>) -> Option<Self::Point> {
        None
    }

    /// For Riemannian models: constant sectional curvature `κ ≤ 0`. Spaces
    /// returning `Some` must also implement [`log_map`](Self::log_map) and
    /// [`exp_map`](Self::exp_map).
    fn curvature(&self) -> Option<f64> {
        None
    }

    /// `log_z(y)` in an orthonormal frame at `z`.
    fn log_map(&self, _z: &Self::Point, _y: &Self::Point) -> Option<DVector<f64>> {
        None
    }

    /// `exp_z(v)` for `v` given in the frame used by [`log_map`](Self::log_map).
    fn exp_map(&self, _z: &Self::Point, _v: &DVector<f64>) -> Option<Self::Point> {
        None
    }

    /// Points at distance `r` from `z` whose geodesics from `z` span the
    /// directions at `z` well enough for derivative-free line searches.
    fn direction_probes(&self, _z: &Self::Point, _r: f64) -> Vec<Self::Point> {
        Vec::new()
    }

    /// Minimizes a geodesically convex objective starting from `start`.
    /// `scale` is a characteristic length of the problem; `hints` are points
    /// where the objective may be nonsmooth (searched along every sweep).
    fn minimize_convex(
        &self,
        objective: &dyn Fn(&Self::Point) -> f64,
        start: &Self::Point,
        scale: f64,
        hints: &[Self::Point],
    ) -> Result<Self::Point> {
        crate::prox::solver::geodesic_pattern_search(self, objective, start, scale, hints)
    }
}

/// `½(ρ(x,w)² + ρ(y,z)² − ρ(x,z)² − ρ(y,w)²)`, the metric stand-in for the
/// inner product of the difference vectors `y − x` and `w − z`.
pub fn quasilinearize<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    w: &S::Point,
) -> f64 {
    let sq = |a: &S::Point, b: &S::Point| {
        let d = space.distance(a, b);
        d * d
    };
    0.5 * (sq(x, w) + sq(y, z) - sq(x, z) - sq(y, w))
}

/// The point `(1 − α)x ⊕ αy`, at arclength `α·ρ(x, y)` from `x`.
pub fn convex_combination<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    alpha: f64,
) -> Result<S::Point> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "convex combination weight {alpha} is outside [0, 1]"
        )));
    }
    if alpha == 0.0 {
        return Ok(x.clone());
    }
    if alpha == 1.0 {
        return Ok(y.clone());
    }
    let d = space.distance(x, y);
    Ok(space.geodesic_point(x, y, alpha * d))
}

/// Angle at the vertex between sides `a` and `b` of a Euclidean triangle
/// whose opposite side is `c`. Side lengths violating the triangle inequality
/// by rounding give `0` or `π`.
pub fn law_of_cosines_angle(a: f64, b: f64, c: f64) -> f64 {
    // Kahan's form; acos of the cosine loses half the digits near 0 and π.
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let mu = if b >= c { c - (a - b) } else { b - (a - c) };
    let num = ((a - b) + c) * mu;
    let den = (a + (b + c)) * ((a - c) + b);
    2.0 * num.max(0.0).sqrt().atan2(den.max(0.0).sqrt())
}

/// The comparison angle at `p` of the triangle `(p, x, y)`.
///
/// `π/2` when exactly one of `x`, `y` coincides with `p` (within the space
/// tolerance) and `0` when both do.
pub fn comparison_angle<S: HadamardSpace + ?Sized>(
    space: &S,
    p: &S::Point,
    x: &S::Point,
    y: &S::Point,
) -> f64 {
    let eps = space.tolerance();
    let a = space.distance(p, x);
    let b = space.distance(p, y);
    match degenerate_angle(a, b, eps) {
        Some(angle) => angle,
        None => law_of_cosines_angle(a, b, space.distance(x, y)),
    }
}

fn degenerate_angle(a: f64, b: f64, eps: f64) -> Option<f64> {
    match (a < eps, b < eps) {
        (true, true) => Some(0.0),
        (true, false) | (false, true) => Some(std::f64::consts::FRAC_PI_2),
        (false, false) => None,
    }
}

/// The Alexandrov angle at `p` between the geodesics to `x` and `y`.
///
/// Uses the space's closed form when it has one, otherwise
/// [`alexandrov_angle_by_limit`].
pub fn alexandrov_angle<S: HadamardSpace + ?Sized>(
    space: &S,
    p: &S::Point,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    let eps = space.tolerance();
    let a = space.distance(p, x);
    let b = space.distance(p, y);
    if let Some(angle) = degenerate_angle(a, b, eps) {
        return Ok(angle);
    }
    match space.exact_angle(p, x, y) {
        Some(angle) => Ok(angle),
        None => alexandrov_angle_by_limit(space, p, x, y),
    }
}

/// Alexandrov angle from comparison angles along shrinking geodesic germs.
///
/// Evaluates the comparison angle at `γ_{p,x}(t_k)`, `γ_{p,y}(t_k)` for
/// `t_k = t_0·2^{-k}`, `t_0 = min(ρ(p,x), ρ(p,y))/2`. In a CAT(0) space the
/// sequence is nonincreasing as `t` shrinks; iteration stops once successive
/// values differ by less than [`EPS_ANGLE`].
pub fn alexandrov_angle_by_limit<S: HadamardSpace + ?Sized>(
    space: &S,
    p: &S::Point,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    let eps = space.tolerance();
    let a = space.distance(p, x);
    let b = space.distance(p, y);
    if let Some(angle) = degenerate_angle(a, b, eps) {
        return Ok(angle);
    }
    let germ_angle = |t: f64| {
        let xt = space.geodesic_point(p, x, t);
        let yt = space.geodesic_point(p, y, t);
        law_of_cosines_angle(t, t, space.distance(&xt, &yt))
    };
    let t0 = 0.5 * a.min(b);
    let mut previous = germ_angle(t0);
    let mut t = t0;
    for _ in 0..ALEXANDROV_MAX_REFINEMENTS {
        t *= 0.5;
        let current = germ_angle(t);
        if (current - previous).abs() < EPS_ANGLE {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::numeric(
        format!(
            "Alexandrov angle did not settle after {ALEXANDROV_MAX_REFINEMENTS} refinements"
        ),
        Some(previous),
    ))
}

/// Slack in the CN inequality:
/// `(1−α)ρ(x,z)² + αρ(y,z)² − α(1−α)ρ(x,y)² − ρ((1−α)x⊕αy, z)²`.
///
/// Nonnegative (up to rounding) in every CAT(0) space; zero in Euclidean space.
pub fn cn_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    alpha: f64,
) -> Result<f64> {
    let m = convex_combination(space, x, y, alpha)?;
    let dxz = space.distance(x, z);
    let dyz = space.distance(y, z);
    let dxy = space.distance(x, y);
    let dmz = space.distance(&m, z);
    Ok((1.0 - alpha) * dxz * dxz + alpha * dyz * dyz
        - alpha * (1.0 - alpha) * dxy * dxy
        - dmz * dmz)
}

/// `ρ(x,y)ρ(z,w) − |⟨xy, zw⟩|`; nonnegative in CAT(0) spaces.
pub fn cauchy_schwarz_slack<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    w: &S::Point,
) -> f64 {
    space.distance(x, y) * space.distance(z, w) - quasilinearize(space, x, y, z, w).abs()
}

/// `(1−α)ρ(x,z) + αρ(y,z) − ρ((1−α)x⊕αy, z)`; nonnegative in CAT(0) spaces.
pub fn distance_convexity_slack<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    alpha: f64,
) -> Result<f64> {
    let m = convex_combination(space, x, y, alpha)?;
    Ok((1.0 - alpha) * space.distance(x, z) + alpha * space.distance(y, z)
        - space.distance(&m, z))
}

/// Worst violation of `distance(γ(s), γ(t)) = |s − t|` over the given
/// arclength pairs on the geodesic from `x` to `y`.
pub fn geodesic_parameterization_error<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    params: &[(f64, f64)],
) -> f64 {
    let d = space.distance(x, y);
    params
        .iter()
        .map(|&(s, t)| {
            let (s, t) = (s.clamp(0.0, d), t.clamp(0.0, d));
            let gs = space.geodesic_point(x, y, s);
            let gt = space.geodesic_point(x, y, t);
            (space.distance(&gs, &gt) - (s - t).abs()).abs()
        })
        .fold(0.0, f64::max)
}

type Planar = [f64; 2];

fn norm(v: Planar) -> f64 {
    v[0].hypot(v[1])
}

fn sub(a: Planar, b: Planar) -> Planar {
    [a[0] - b[0], a[1] - b[1]]
}

fn planar_angle(u: Planar, v: Planar) -> f64 {
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.abs().atan2(dot)
}

/// `|x − y| + |y − z| − |x| − |z|` for nonzero planar vectors whose angles
/// `θ = ∠(x, y)` and `θ' = ∠(z, y)` satisfy `θ + θ' ≥ π`.
pub fn alexandrov_lemma_gap(x: Planar, y: Planar, z: Planar) -> Result<f64> {
    if norm(x) == 0.0 || norm(y) == 0.0 || norm(z) == 0.0 {
        return Err(Error::domain("Alexandrov lemma needs nonzero vectors"));
    }
    let theta = planar_angle(x, y);
    let theta_prime = planar_angle(z, y);
    // Angles computed via atan2 are exact to a few ulps; allow that much.
    if theta + theta_prime < std::f64::consts::PI - 4.0 * f64::EPSILON {
        return Err(Error::domain(format!(
            "angle sum {} is below π",
            theta + theta_prime
        )));
    }
    Ok(norm(sub(x, y)) + norm(sub(y, z)) - norm(x) - norm(z))
}

/// A planar triangle with prescribed side lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonTriangle {
    pub x: Planar,
    pub y: Planar,
    pub z: Planar,
}

impl ComparisonTriangle {
    /// Builds the triangle with `|x̄ȳ| = dxy`, `|ȳz̄| = dyz`, `|z̄x̄| = dzx`,
    /// placing `x̄` at the origin and `ȳ` on the positive first axis.
    pub fn from_sides(dxy: f64, dyz: f64, dzx: f64) -> Result<Self> {
        let sides = [dxy, dyz, dzx];
        if sides.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::domain("side lengths must be finite and nonnegative"));
        }
        let slack = 1e-12 * (1.0 + dxy + dyz + dzx);
        if dxy > dyz + dzx + slack || dyz > dxy + dzx + slack || dzx > dxy + dyz + slack {
            return Err(Error::domain("side lengths violate the triangle inequality"));
        }
        let z = if dxy == 0.0 {
            [dzx, 0.0]
        } else {
            let u = (dxy * dxy + dzx * dzx - dyz * dyz) / (2.0 * dxy);
            let u = u.clamp(-dzx, dzx);
            [u, (dzx * dzx - u * u).max(0.0).sqrt()]
        };
        Ok(Self {
            x: [0.0, 0.0],
            y: [dxy, 0.0],
            z,
        })
    }

    /// Comparison triangle of three points of a space.
    pub fn of<S: HadamardSpace + ?Sized>(
        space: &S,
        x: &S::Point,
        y: &S::Point,
        z: &S::Point,
    ) -> Result<Self> {
        Self::from_sides(space.distance(x, y), space.distance(y, z), space.distance(z, x))
    }

    pub fn side_lengths(&self) -> [f64; 3] {
        [
            norm(sub(self.x, self.y)),
            norm(sub(self.y, self.z)),
            norm(sub(self.z, self.x)),
        ]
    }
}
