//! Tangent vectors as scaled geodesic germs.
//!
//! A tangent vector at `p` is stored as a representative `(α, x)` of the
//! class `α·γ_{p,x}`. Everything computed here factors through the length
//! `α·ρ(p, x)` and the Alexandrov angle between germs, so results do not
//! depend on the representative.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{alexandrov_angle, convex_combination, quasilinearize, HadamardSpace};
use crate::tolerance::{tangent_equiv_tol, EPS_ANGLE};

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<P> {
    base: P,
    scale: f64,
    anchor: P,
    length: f64,
}

impl<P: Clone> TangentVector<P> {
    /// `scale · γ_{base, anchor}`.
    pub fn new<S>(space: &S, base: P, scale: f64, anchor: P) -> Result<Self>
    where
        S: HadamardSpace<Point = P> + ?Sized,
    {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::domain(format!(
                "tangent vector scale must be nonnegative, got {scale}"
            )));
        }
        let length = scale * space.distance(&base, &anchor);
        Ok(Self {
            base,
            scale,
            anchor,
            length,
        })
    }

    /// The vertex `0_p` of the tangent cone.
    pub fn zero(base: P) -> Self {
        Self {
            anchor: base.clone(),
            base,
            scale: 0.0,
            length: 0.0,
        }
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn anchor(&self) -> &P {
        &self.anchor
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_zero(&self) -> bool {
        self.length == 0.0
    }

    /// `λ·u` for `λ ≥ 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::domain(format!("cannot scale by {lambda}")));
        }
        Ok(Self {
            base: self.base.clone(),
            scale: self.scale * lambda,
            anchor: self.anchor.clone(),
            length: self.length * lambda,
        })
    }
}

fn check_same_base<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
    v: &TangentVector<S::Point>,
) -> Result<()> {
    if u.base != v.base && space.distance(&u.base, &v.base) > 0.0 {
        return Err(Error::domain(
            "tangent vectors are based at different points",
        ));
    }
    Ok(())
}

/// Angle between the germs of two tangent vectors; `π/2` or `0` when one or
/// both germs are degenerate.
pub fn germ_angle<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
    v: &TangentVector<S::Point>,
) -> Result<f64> {
    check_same_base(space, u, v)?;
    alexandrov_angle(space, &u.base, &u.anchor, &v.anchor)
}

/// `d_p(u, v) = √(ℓ_u² + ℓ_v² − 2ℓ_uℓ_v cos ∠_p(u, v))`.
pub fn tangent_metric<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
    v: &TangentVector<S::Point>,
) -> Result<f64> {
    check_same_base(space, u, v)?;
    let (lu, lv) = (u.length, v.length);
    if lu == 0.0 || lv == 0.0 {
        return Ok(lu + lv);
    }
    let cos = germ_angle(space, u, v)?.cos();
    Ok((lu * lu + lv * lv - 2.0 * lu * lv * cos).max(0.0).sqrt())
}

/// `g_p(u, v) = ℓ_u ℓ_v cos ∠_p(u, v)`.
pub fn tangent_pairing<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
    v: &TangentVector<S::Point>,
) -> Result<f64> {
    check_same_base(space, u, v)?;
    if u.length == 0.0 || v.length == 0.0 {
        return Ok(0.0);
    }
    Ok(u.length * v.length * germ_angle(space, u, v)?.cos())
}

/// Whether `u` and `v` represent the same tangent vector, up to `tol` in
/// length and [`EPS_ANGLE`] in angle.
pub fn tangent_equiv<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
    v: &TangentVector<S::Point>,
    tol: Option<f64>,
) -> Result<bool> {
    check_same_base(space, u, v)?;
    let tol = tol.unwrap_or_else(|| tangent_equiv_tol(u.length, v.length));
    if u.length < tol && v.length < tol {
        return Ok(true);
    }
    if (u.length - v.length).abs() >= tol {
        return Ok(false);
    }
    Ok(germ_angle(space, u, v)? < EPS_ANGLE)
}

/// `(1/ε)·⟨px, p((1−ε)p ⊕ εy)⟩`, the finite-ε approximant of
/// `g_p(γ_{p,x}, γ_{p,y})`.
pub fn pairing_limit_estimate<S: HadamardSpace + ?Sized>(
    space: &S,
    p: &S::Point,
    x: &S::Point,
    y: &S::Point,
    eps: f64,
) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain(format!("ε = {eps} is outside (0, 1]")));
    }
    let y_eps = convex_combination(space, p, y, eps)?;
    Ok(quasilinearize(space, p, x, p, &y_eps) / eps)
}

/// The isometry `α·γ_{p,x} ↦ α(x − p)` of a Euclidean tangent space onto
/// the ambient vector space.
pub fn euclid_embed<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
) -> Result<DVector<f64>> {
    let (Some(p), Some(x)) = (space.coordinates(&u.base), space.coordinates(&u.anchor)) else {
        return Err(Error::domain(format!(
            "tangent embedding needs a Euclidean space, got {}",
            space.name()
        )));
    };
    Ok((x - p) * u.scale)
}
