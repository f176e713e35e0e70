//! Numerical tolerances shared across modules.

/// Metric resolution of the Euclidean model.
pub const EPS_GEOM_EUCLIDEAN: f64 = 1e-9;
/// Metric resolution of the half-plane model (transcendental distance).
pub const EPS_GEOM_HALF_PLANE: f64 = 1e-7;
/// Metric resolution of metric trees.
pub const EPS_GEOM_TREE: f64 = 1e-9;

/// Agreement required between successive Alexandrov-angle refinements and
/// between angles treated as equal.
pub const EPS_ANGLE: f64 = 1e-5;
/// Halvings of the germ length before the angle refinement gives up.
pub const ALEXANDROV_MAX_REFINEMENTS: usize = 40;

/// Objective stationarity of the derivative-free prox solver.
pub const EPS_PROX: f64 = 1e-8;
/// Allowed residual of the resolvent identity `J_μ((1−μ/λ)J_λx ⊕ (μ/λ)x) = J_λx`.
pub const EPS_IDENTITY: f64 = 1e-6;

/// Default tolerance for tangent-vector equivalence, scaled by the lengths.
pub fn tangent_equiv_tol(len_u: f64, len_v: f64) -> f64 {
    1e-8 * (1.0 + len_u + len_v)
}
