//! Residuals and gaps for the inequalities satisfied by resolvents.
//!
//! Each function returns a signed number whose sign convention makes the
//! healthy side nonnegative (slacks, gaps) or small (residuals).

use super::field::{resolvent, selection, VectorField};
use super::ConvexFunction;
use crate::error::{Error, Result};
use crate::geometry::{convex_combination, quasilinearize, HadamardSpace};
use crate::tangent::{tangent_pairing, TangentVector};

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {value} must be positive")))
    }
}

/// `f(y) + ρ(y, x)²/(2λ)`.
pub fn moreau_objective<S: HadamardSpace + ?Sized>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    lambda: f64,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    check_positive("λ", lambda)?;
    let fy = f.evaluate(space, y)?;
    if fy == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let d = space.distance(x, y);
    Ok(fy + d * d / (2.0 * lambda))
}

/// `g_x(u, γ_{x,y}) + g_y(v, γ_{y,x})` for graph elements `u ∈ Ax`,
/// `v ∈ Ay`. Nonpositive for monotone fields.
pub fn graph_monotonicity_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    u: &TangentVector<S::Point>,
    v: &TangentVector<S::Point>,
) -> Result<f64> {
    let (x, y) = (u.base(), v.base());
    let to_y = TangentVector::new(space, x.clone(), 1.0, y.clone())?;
    let to_x = TangentVector::new(space, y.clone(), 1.0, x.clone())?;
    Ok(tangent_pairing(space, u, &to_y)? + tangent_pairing(space, v, &to_x)?)
}

/// [`graph_monotonicity_gap`] evaluated on the stored selection of `A`.
pub fn monotonicity_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    let u = selection(space, field, x).map_err(into_domain)?;
    let v = selection(space, field, y).map_err(into_domain)?;
    graph_monotonicity_gap(space, &u, &v)
}

fn into_domain(e: Error) -> Error {
    match e {
        Error::NotInDomain(m) => Error::Domain(m),
        other => other,
    }
}

/// `ρ(J_μ((1 − μ/λ)J_λx ⊕ (μ/λ)x), J_λx)` for `0 < μ ≤ λ`; vanishes up to
/// solver error.
pub fn resolvent_identity_residual<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    mu: f64,
    x: &S::Point,
) -> Result<f64> {
    check_positive("λ", lambda)?;
    check_positive("μ", mu)?;
    if mu > lambda {
        return Err(Error::domain(format!("μ = {mu} exceeds λ = {lambda}")));
    }
    let jl = resolvent(space, field, lambda, x)?;
    let inner = convex_combination(space, &jl, x, mu / lambda)?;
    let jm = resolvent(space, field, mu, &inner)?;
    Ok(space.distance(&jm, &jl))
}

/// `⟨J_λx J_λy, xy⟩ − ρ(J_λx, J_λy)²`; nonnegative when `J_λ` is firmly
/// metrically nonspreading.
pub fn firm_nonspread_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    let jx = resolvent(space, field, lambda, x)?;
    let jy = resolvent(space, field, lambda, y)?;
    let d = space.distance(&jx, &jy);
    Ok(quasilinearize(space, &jx, &jy, x, y) - d * d)
}

/// `ρ((1−α)J_λx ⊕ αx, (1−α)J_λy ⊕ αy) − ρ(J_λx, J_λy)`.
pub fn firm_nonexpansive_slack<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    alpha: f64,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    let jx = resolvent(space, field, lambda, x)?;
    let jy = resolvent(space, field, lambda, y)?;
    let cx = convex_combination(space, &jx, x, alpha)?;
    let cy = convex_combination(space, &jy, y, alpha)?;
    Ok(space.distance(&cx, &cy) - space.distance(&jx, &jy))
}

/// `λρ(J_λx,y)² + μρ(J_μy,x)² − μρ(J_λx,x)² − λρ(J_μy,y)² − (λ+μ)ρ(J_λx,J_μy)²`.
pub fn resolvent_comparison_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    mu: f64,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    check_positive("λ", lambda)?;
    check_positive("μ", mu)?;
    let jx = resolvent(space, field, lambda, x)?;
    let jy = resolvent(space, field, mu, y)?;
    let sq = |a: &S::Point, b: &S::Point| space.distance(a, b).powi(2);
    Ok(lambda * sq(&jx, y) + mu * sq(&jy, x)
        - mu * sq(&jx, x)
        - lambda * sq(&jy, y)
        - (lambda + mu) * sq(&jx, &jy))
}

/// `((1/μ)ρ(J_μJ_λx, J_λx), (1/λ)ρ(J_λx, x))`; the first never exceeds the
/// second.
pub fn local_residual_ratio<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    mu: f64,
    x: &S::Point,
) -> Result<(f64, f64)> {
    check_positive("λ", lambda)?;
    check_positive("μ", mu)?;
    let jl = resolvent(space, field, lambda, x)?;
    let jmjl = resolvent(space, field, mu, &jl)?;
    Ok((
        space.distance(&jmjl, &jl) / mu,
        space.distance(&jl, x) / lambda,
    ))
}

/// `min_y [M(y) − M(z)]` over `candidates`, where `M` is the Moreau
/// objective centred at `x`. Negative values mean a candidate beat `z`.
pub fn prox_optimality_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    lambda: f64,
    x: &S::Point,
    z: &S::Point,
    candidates: &[S::Point],
) -> Result<f64> {
    let mz = moreau_objective(space, f, lambda, x, z)?;
    let mut gap = f64::INFINITY;
    for y in candidates {
        let my = moreau_objective(space, f, lambda, x, y)?;
        gap = gap.min(my - mz);
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::EuclideanMap;
    use crate::spaces::{ConvexSet, Euclidean, HalfPlane, HalfPlanePoint};
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn half_sq_at_origin() -> VectorField<DVector<f64>> {
        VectorField::Subdifferential(ConvexFunction::HalfSquaredDistanceTo(v(&[0.])))
    }

    #[test]
    fn moreau_objective_examples() {
        let r1 = Euclidean::new(1);
        let f = ConvexFunction::HalfSquaredDistanceTo(v(&[0.]));
        assert_abs_diff_eq!(
            moreau_objective(&r1, &f, 1.0, &v(&[2.]), &v(&[1.])).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let zero = ConvexFunction::zero();
        assert_abs_diff_eq!(
            moreau_objective(&r1, &zero, 2.0, &v(&[3.]), &v(&[1.])).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let ind = ConvexFunction::IndicatorOf(ConvexSet::Ball { center: v(&[0.]), radius: 1.0 });
        assert_eq!(
            moreau_objective(&r1, &ind, 1.0, &v(&[0.]), &v(&[5.])).unwrap(),
            f64::INFINITY
        );
        assert!(moreau_objective(&r1, &zero, 0.0, &v(&[0.]), &v(&[0.])).is_err());
    }

    #[test]
    fn monotonicity_examples() {
        let r1 = Euclidean::new(1);
        let dist = VectorField::Subdifferential(ConvexFunction::DistanceTo(v(&[0.])));
        // Subgradients +1 at both points: (+1)(1) + (+1)(−1) = 0.
        let gap = monotonicity_gap(&r1, &dist, &v(&[1.]), &v(&[2.])).unwrap();
        assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-12);
        // Opposite sides: (−1)(3) + (+1)(−3) = −6.
        let gap = monotonicity_gap(&r1, &dist, &v(&[-1.]), &v(&[2.])).unwrap();
        assert_abs_diff_eq!(gap, -6.0, epsilon = 1e-12);

        let r2 = Euclidean::new(2);
        let id = VectorField::EuclideanMap(
            EuclideanMap::affine(DMatrix::identity(2, 2), v(&[0., 0.])).unwrap(),
        );
        let (x, y) = (v(&[1., 2.]), v(&[-0.5, 4.]));
        let gap = monotonicity_gap(&r2, &id, &x, &y).unwrap();
        assert_abs_diff_eq!(gap, -(x - y).norm_squared(), epsilon = 1e-12);
        let gap = monotonicity_gap(&r2, &id, &v(&[1., 1.]), &v(&[1., 1.])).unwrap();
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn monotonicity_outside_domain_is_domain_error() {
        let r1 = Euclidean::new(1);
        let ind = VectorField::Subdifferential(ConvexFunction::IndicatorOf(ConvexSet::Ball {
            center: v(&[0.]),
            radius: 1.0,
        }));
        assert!(matches!(
            monotonicity_gap(&r1, &ind, &v(&[3.]), &v(&[0.])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn identity_residual_examples() {
        let r1 = Euclidean::new(1);
        let a = half_sq_at_origin();
        assert_eq!(resolvent_identity_residual(&r1, &a, 2.0, 2.0, &v(&[3.])).unwrap(), 0.0);
        assert!(resolvent_identity_residual(&r1, &a, 2.0, 1.0, &v(&[3.])).unwrap() < 1e-15);
        assert!(resolvent_identity_residual(&r1, &a, 1.0, 2.0, &v(&[3.])).is_err());

        let hp = HalfPlane;
        let q = HalfPlanePoint::new(0.4, 1.3);
        let a = VectorField::Subdifferential(ConvexFunction::HalfSquaredDistanceTo(q));
        let x = HalfPlanePoint::new(-2.0, 0.2);
        assert!(resolvent_identity_residual(&hp, &a, 1.0, 0.3, &x).unwrap() < 1e-6);
    }

    #[test]
    fn firm_nonspread_with_zero_point() {
        let r2 = Euclidean::new(2);
        let set = ConvexSet::Halfspace { normal: v(&[1., 1.]), offset: 1.0 };
        let a = VectorField::Subdifferential(ConvexFunction::IndicatorOf(set));
        let (x, y) = (v(&[3., 2.]), v(&[-1., 4.]));
        let gap = firm_nonspread_gap(&r2, &a, 0.7, &x, &y).unwrap();
        // Classical oracle: ⟨Px − Py, x − y⟩ − |Px − Py|².
        let proj = |p: &DVector<f64>| {
            let n = v(&[1., 1.]);
            let excess = (n.dot(p) - 1.0).max(0.0) / n.norm_squared();
            p - n * excess
        };
        let (px, py) = (proj(&x), proj(&y));
        let oracle = (&px - &py).dot(&(&x - &y)) - (&px - &py).norm_squared();
        assert_abs_diff_eq!(gap, oracle, epsilon = 1e-12);
        assert!(gap >= 0.0);
        assert_eq!(firm_nonspread_gap(&r2, &a, 0.7, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn firm_nonexpansive_at_endpoints() {
        let hp = HalfPlane;
        let a = VectorField::Subdifferential(ConvexFunction::DistanceTo(HalfPlanePoint::new(0.0, 1.0)));
        let (x, y) = (HalfPlanePoint::new(3.0, 0.5), HalfPlanePoint::new(-1.0, 4.0));
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            assert!(firm_nonexpansive_slack(&hp, &a, 0.8, alpha, &x, &y).unwrap() >= -1e-9);
        }
        assert_eq!(firm_nonexpansive_slack(&hp, &a, 0.8, 0.0, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn comparison_gap_example() {
        // J₁1 = ½, J₂(−1) = −⅓.
        let r1 = Euclidean::new(1);
        let a = half_sq_at_origin();
        let gap = resolvent_comparison_gap(&r1, &a, 1.0, 2.0, &v(&[1.]), &v(&[-1.])).unwrap();
        let (jx, jy): (f64, f64) = (0.5, -1.0 / 3.0);
        let oracle = (jx + 1.0).powi(2) + 2.0 * (jy - 1.0).powi(2)
            - 2.0 * (jx - 1.0).powi(2)
            - (jy + 1.0).powi(2)
            - 3.0 * (jx - jy).powi(2);
        assert_abs_diff_eq!(gap, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(gap, 25.0 / 9.0, epsilon = 1e-12);
        let same = resolvent_comparison_gap(&r1, &a, 1.5, 1.5, &v(&[2.]), &v(&[2.])).unwrap();
        assert_abs_diff_eq!(same, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn local_ratio_examples() {
        let r1 = Euclidean::new(1);
        let a = half_sq_at_origin();
        let (first, second) = local_residual_ratio(&r1, &a, 1.0, 1.0, &v(&[4.])).unwrap();
        assert_abs_diff_eq!(first, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(second, 2.0, epsilon = 1e-15);
        assert_eq!(local_residual_ratio(&r1, &a, 1.0, 3.0, &v(&[0.])).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn optimality_gap_against_candidates() {
        let r1 = Euclidean::new(1);
        let f = ConvexFunction::HalfSquaredDistanceTo(v(&[0.]));
        let cands: Vec<_> = (-20..=20).map(|k| v(&[k as f64 * 0.25])).collect();
        let gap = prox_optimality_gap(&r1, &f, 1.0, &v(&[2.]), &v(&[1.]), &cands).unwrap();
        assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-15);
        let bad = prox_optimality_gap(&r1, &f, 1.0, &v(&[2.]), &v(&[1.5]), &cands).unwrap();
        assert!(bad < 0.0);
    }
}
