//! The upper half-plane model of the hyperbolic plane (curvature −1).
//!
//! Distances use `2·asinh(|z₁ − z₂| / (2√(b₁b₂)))`, which equals the usual
//! `arcosh(1 + |z₁ − z₂|²/(2b₁b₂))` but keeps full relative precision for
//! nearby points. Geodesics are evaluated through the hyperboloid model, where
//! the unit-speed geodesic from `X` to `Y` is
//! `(sinh(d − s)·X + sinh(s)·Y) / sinh(d)`; the two half-plane coordinates
//! are recovered from the linear components `x₀ − x₂ = 1/b` and `x₁ = a/b`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{mismatch, project_common, ConvexSet};
use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::tolerance::EPS_GEOM_HALF_PLANE;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub re: f64,
    pub im: f64,
}

impl HalfPlanePoint {
    /// Unchecked constructor; see [`HalfPlanePoint::try_new`].
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn try_new(re: f64, im: f64) -> Result<Self> {
        let p = Self { re, im };
        check(&p)?;
        Ok(p)
    }
}

fn check(p: &HalfPlanePoint) -> Result<()> {
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(Error::domain("half-plane point has non-finite coordinates"));
    }
    if p.im <= 0.0 {
        return Err(Error::domain(format!(
            "half-plane point needs a positive imaginary part, got {}",
            p.im
        )));
    }
    Ok(())
}

fn raw_distance(z1: &HalfPlanePoint, z2: &HalfPlanePoint) -> f64 {
    let chord = (z1.re - z2.re).hypot(z1.im - z2.im);
    2.0 * (chord / (2.0 * (z1.im * z2.im).sqrt())).asinh()
}

/// Hyperbolic distance between two points of the upper half-plane.
pub fn hp_distance(z1: &HalfPlanePoint, z2: &HalfPlanePoint) -> Result<f64> {
    check(z1)?;
    check(z2)?;
    Ok(raw_distance(z1, z2))
}

/// The hyperbolic plane as the upper half-plane `{(a, b) : b > 0}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HalfPlane;

impl HalfPlane {
    /// Point at signed arclength `s` on the complete geodesic through `x`
    /// and `y`, measured from `x` toward `y`. Valid for any real `s`.
    pub fn geodesic_point_unclamped(
        &self,
        x: &HalfPlanePoint,
        y: &HalfPlanePoint,
        s: f64,
    ) -> HalfPlanePoint {
        let d = raw_distance(x, y);
        if d == 0.0 {
            return *x;
        }
        let sd = d.sinh();
        let wx = (d - s).sinh() / sd;
        let wy = s.sinh() / sd;
        let inv_b = wx / x.im + wy / y.im;
        let b = 1.0 / inv_b;
        let a = b * (wx * x.re / x.im + wy * y.re / y.im);
        HalfPlanePoint::new(a, b)
    }

    /// Euclidean direction (not normalized) of the initial tangent of the
    /// geodesic from `p` to `x`.
    fn initial_tangent(p: &HalfPlanePoint, x: &HalfPlanePoint) -> [f64; 2] {
        let da = x.re - p.re;
        let db = x.im - p.im;
        [2.0 * p.im * da, da * da + db * (x.im + p.im)]
    }
}

impl HadamardSpace for HalfPlane {
    type Point = HalfPlanePoint;

    fn name(&self) -> &'static str {
        "half_plane"
    }

    fn tolerance(&self) -> f64 {
        EPS_GEOM_HALF_PLANE
    }

    fn validate(&self, p: &HalfPlanePoint) -> Result<()> {
        check(p)
    }

    fn distance(&self, x: &HalfPlanePoint, y: &HalfPlanePoint) -> f64 {
        raw_distance(x, y)
    }

    fn geodesic_point(&self, x: &HalfPlanePoint, y: &HalfPlanePoint, s: f64) -> HalfPlanePoint {
        let d = raw_distance(x, y);
        if s <= 0.0 || d == 0.0 {
            return *x;
        }
        if s >= d {
            return *y;
        }
        self.geodesic_point_unclamped(x, y, s)
    }

    fn extend_geodesic(
        &self,
        from: &HalfPlanePoint,
        through: &HalfPlanePoint,
        t: f64,
    ) -> Option<HalfPlanePoint> {
        let d = raw_distance(from, through);
        if d == 0.0 {
            return None;
        }
        Some(self.geodesic_point_unclamped(from, through, d + t))
    }

    /// The metric is conformal, so the Riemannian angle is the Euclidean
    /// angle between the initial tangents of the two geodesics.
    fn exact_angle(
        &self,
        p: &HalfPlanePoint,
        x: &HalfPlanePoint,
        y: &HalfPlanePoint,
    ) -> Option<f64> {
        let u = Self::initial_tangent(p, x);
        let v = Self::initial_tangent(p, y);
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        Some(cross.abs().atan2(dot))
    }

    fn project(&self, set: &ConvexSet<HalfPlanePoint>, x: &HalfPlanePoint) -> Result<HalfPlanePoint> {
        if let Some(p) = project_common(self, set, x) {
            return p;
        }
        match set {
            ConvexSet::Segment(a, b) => {
                let len = raw_distance(a, b);
                let c = raw_distance(a, x);
                if len == 0.0 || c == 0.0 {
                    return Ok(*a);
                }
                // Right triangle with hypotenuse c and angle θ at `a`:
                // tanh(foot) = tanh(c)·cos θ.
                let theta = self.exact_angle(a, b, x).expect("closed form");
                let foot = (c.tanh() * theta.cos()).atanh();
                Ok(self.geodesic_point(a, b, foot.clamp(0.0, len)))
            }
            other => Err(mismatch("half_plane", other)),
        }
    }

    fn curvature(&self) -> Option<f64> {
        Some(-1.0)
    }

    /// Frame `(b∂_a, b∂_b)` at `z = (a, b)`.
    fn log_map(&self, z: &HalfPlanePoint, y: &HalfPlanePoint) -> Option<DVector<f64>> {
        let d = raw_distance(z, y);
        if d == 0.0 {
            return Some(DVector::zeros(2));
        }
        let [u, v] = Self::initial_tangent(z, y);
        let n = u.hypot(v);
        Some(DVector::from_column_slice(&[d * u / n, d * v / n]))
    }

    /// Rotates the upward geodesic through `i` by the Möbius rotation about
    /// `i`, then maps `i ↦ z` by `w ↦ a + b·w`.
    fn exp_map(&self, z: &HalfPlanePoint, v: &DVector<f64>) -> Option<HalfPlanePoint> {
        if v.len() != 2 {
            return None;
        }
        let t = v[0].hypot(v[1]);
        if t == 0.0 {
            return Some(*z);
        }
        let half = 0.5 * (v[1].atan2(v[0]) - std::f64::consts::FRAC_PI_2);
        let (s, c) = half.sin_cos();
        let e = t.exp();
        let den = c * c + s * s * e * e;
        let re = -s * c * (2.0 * t).exp_m1() / den;
        let im = e / den;
        Some(HalfPlanePoint::new(z.re + z.im * re, z.im * im))
    }

    fn direction_probes(&self, z: &HalfPlanePoint, r: f64) -> Vec<HalfPlanePoint> {
        const LINES: usize = 4;
        (0..2 * LINES)
            .map(|k| {
                let phi = std::f64::consts::PI * k as f64 / LINES as f64;
                let near = HalfPlanePoint::new(
                    z.re + 0.5 * z.im * phi.cos(),
                    z.im * (1.0 + 0.5 * phi.sin()),
                );
                self.geodesic_point_unclamped(z, &near, r)
            })
            .collect()
    }
}
