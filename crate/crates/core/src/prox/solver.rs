//! Derivative-free minimization of geodesically convex objectives.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::tolerance::EPS_PROX;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_SWEEPS: usize = 5_000;

/// Golden-section search for the minimum of a unimodal function on
/// `[lo, hi]`. Returns the best abscissa seen and its value.
pub fn golden_section(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    [(a, fa), (b, fb), (c, fc), (d, fd), (hi, f(hi))]
        .into_iter()
        .fold((lo, f(lo)), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Pattern search along geodesics through the incumbent.
///
/// Each sweep runs an exact line search (golden section) along the geodesic
/// to every probe returned by [`HadamardSpace::direction_probes`]. The probe
/// radius doubles when a line search ends at its far end and shrinks when a
/// sweep stops making progress; the search ends once the radius falls below
/// metric resolution relative to `scale` and the last sweep changed the
/// objective by less than [`EPS_PROX`]. Each sweep also searches the
/// geodesic to every hint, which lets the search land exactly on a kink.
pub fn geodesic_pattern_search<S: HadamardSpace + ?Sized>(
    space: &S,
    objective: &dyn Fn(&S::Point) -> f64,
    start: &S::Point,
    scale: f64,
    hints: &[S::Point],
) -> Result<S::Point> {
    let mut z = start.clone();
    let mut fz = objective(&z);
    if !fz.is_finite() {
        return Err(Error::domain(
            "generic solver started outside the effective domain",
        ));
    }
    let r_min = 1e-10 * (1.0 + scale);
    let mut r = scale.max(r_min);
    for _ in 0..MAX_SWEEPS {
        let f_before = fz;
        let mut longest_step: f64 = 0.0;
        let mut hit_far_end = false;
        let probes = space.direction_probes(&z, r);
        if probes.is_empty() {
            return Err(Error::Unsupported(format!(
                "{} space provides no search directions",
                space.name()
            )));
        }
        for probe in probes {
            let len = space.distance(&z, &probe);
            if len == 0.0 {
                continue;
            }
            let line = |t: f64| objective(&space.geodesic_point(&z, &probe, t));
            let (t, ft) = golden_section(line, 0.0, len, 1e-11 * len + 1e-15);
            if ft < fz {
                z = space.geodesic_point(&z, &probe, t);
                fz = ft;
                longest_step = longest_step.max(t);
                hit_far_end |= t > 0.95 * len;
            }
        }
        for hint in hints {
            let len = space.distance(&z, hint);
            if len == 0.0 {
                continue;
            }
            let line = |t: f64| objective(&space.geodesic_point(&z, hint, t));
            let (t, ft) = golden_section(line, 0.0, len, 1e-11 * len + 1e-15);
            if ft < fz {
                z = if t == len { hint.clone() } else { space.geodesic_point(&z, hint, t) };
                fz = ft;
            }
        }
        let progress = f_before - fz;
        if hit_far_end {
            r *= 2.0;
        } else if longest_step > 0.0 {
            r = (2.0 * longest_step).clamp(0.25 * r, r);
        } else {
            r *= 0.25;
        }
        if r < r_min && progress <= EPS_PROX * (1.0 + fz.abs()) {
            return Ok(z);
        }
    }
    Err(Error::numeric(
        format!("generic prox solver did not converge; best iterate {z:?}"),
        Some(fz),
    ))
}

/// `weight·ρ(·, anchor)`, or `weight·ρ(·, anchor)²/2` when `squared`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTerm<P> {
    pub weight: f64,
    pub squared: bool,
    pub anchor: P,
}

const MAX_NEWTON: usize = 200;

/// `d·(√−κ·coth(√−κ·d))`, the transverse Hessian factor of `ρ²/2`.
fn transverse(kappa: f64, d: f64) -> f64 {
    let x = (-kappa).sqrt() * d;
    if x < 1e-8 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

struct Local {
    value: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
    /// Total weight of unsquared terms anchored at the point itself.
    kink: f64,
}

fn local<S: HadamardSpace + ?Sized>(
    space: &S,
    kappa: f64,
    terms: &[DistanceTerm<S::Point>],
    y: &S::Point,
) -> Option<Local> {
    let mut out: Option<Local> = None;
    for t in terms {
        let v = space.log_map(y, &t.anchor)?;
        let n = v.len();
        let acc = out.get_or_insert_with(|| Local {
            value: 0.0,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
            kink: 0.0,
        });
        let d = space.distance(y, &t.anchor);
        let w = t.weight;
        if d == 0.0 {
            if t.squared {
                acc.hess += DMatrix::identity(n, n) * w;
            } else {
                acc.kink += w;
            }
            continue;
        }
        let u = &v / v.norm();
        let radial = &u * u.transpose();
        let across = DMatrix::identity(n, n) - &radial;
        let c = transverse(kappa, d);
        if t.squared {
            acc.value += 0.5 * w * d * d;
            acc.grad -= &v * w;
            acc.hess += (radial + across * c) * w;
        } else {
            acc.value += w * d;
            acc.grad -= u * w;
            acc.hess += across * (w * c / d);
        }
    }
    out
}

fn total<S: HadamardSpace + ?Sized>(space: &S, terms: &[DistanceTerm<S::Point>], y: &S::Point) -> f64 {
    terms
        .iter()
        .map(|t| {
            let d = space.distance(y, &t.anchor);
            if t.squared {
                0.5 * t.weight * d * d
            } else {
                t.weight * d
            }
        })
        .sum()
}

/// Minimizes `Σ terms` by damped Riemannian Newton in spaces that expose
/// [`HadamardSpace::curvature`], `log_map` and `exp_map`; `Ok(None)` for
/// other spaces. Needs a squared term with positive weight (strong
/// convexity).
///
/// Unsquared terms are nonsmooth at their anchors. Each anchor is first
/// tested for optimality through its subdifferential, so minimizers sitting
/// on a kink are returned exactly.
pub fn minimize_distance_sum<S: HadamardSpace + ?Sized>(
    space: &S,
    terms: &[DistanceTerm<S::Point>],
    start: &S::Point,
) -> Result<Option<S::Point>> {
    let Some(kappa) = space.curvature() else {
        return Ok(None);
    };
    let terms: Vec<_> = terms.iter().filter(|t| t.weight > 0.0).cloned().collect();
    let modulus: f64 = terms.iter().filter(|t| t.squared).map(|t| t.weight).sum();
    if modulus <= 0.0 {
        return Ok(None);
    }
    let scale = 1.0 + terms.iter().map(|t| space.distance(start, &t.anchor)).fold(0.0, f64::max);
    let step_tol = 1e-15 * scale;
    let exp = |y: &S::Point, v: &DVector<f64>| space.exp_map(y, v).expect("exp_map with curvature");
    // Leaves a kink along the minimal-norm subgradient; strong convexity
    // puts the minimizer within |s|/modulus of the kink.
    let exit = |q: &S::Point, loc: &Local| {
        let g = loc.grad.norm();
        let dir = &loc.grad / -g;
        let reach = (g - loc.kink) / modulus;
        let line = |t: f64| total(space, &terms, &exp(q, &(&dir * t)));
        let (t, ft) = golden_section(line, 0.0, reach, 1e-12 * reach);
        (exp(q, &(&dir * t)), ft)
    };
    let mut y = start.clone();
    let mut fy = total(space, &terms, &y);
    for t in terms.iter().filter(|t| !t.squared) {
        let Some(loc) = local(space, kappa, &terms, &t.anchor) else {
            return Ok(None);
        };
        if loc.grad.norm() <= loc.kink {
            return Ok(Some(t.anchor.clone()));
        }
        let (e, fe) = exit(&t.anchor, &loc);
        if fe < fy {
            (y, fy) = (e, fe);
        }
    }
    for _ in 0..MAX_NEWTON {
        let Some(loc) = local(space, kappa, &terms, &y) else {
            return Ok(None);
        };
        if loc.kink > 0.0 {
            y = exit(&y, &loc).0;
            continue;
        }
        let delta = match loc.hess.clone().cholesky() {
            Some(ch) => ch.solve(&-&loc.grad),
            None => &loc.grad / -modulus,
        };
        let len = delta.norm();
        if len <= step_tol {
            return Ok(Some(y));
        }
        let decrease = -loc.grad.dot(&delta);
        let slack = 8.0 * f64::EPSILON * (1.0 + loc.value.abs());
        let mut t = 1.0;
        let accepted = loop {
            let cand = exp(&y, &(&delta * t));
            if total(space, &terms, &cand) <= loc.value - 1e-4 * t * decrease + slack {
                break Some(cand);
            }
            t *= 0.5;
            if t * len <= step_tol {
                break None;
            }
        };
        match accepted {
            Some(next) => {
                y = next;
                if t == 1.0 && len <= 1e3 * step_tol {
                    return Ok(Some(y));
                }
            }
            None => {
                // Newton direction unusable (typically right next to a kink):
                // exact line search along the negative gradient instead.
                let g = loc.grad.norm();
                if g == 0.0 {
                    return Ok(Some(y));
                }
                let dir = &loc.grad / -g;
                let line = |t: f64| total(space, &terms, &exp(&y, &(&dir * t)));
                let reach = g / modulus;
                let (t, ft) = golden_section(line, 0.0, reach, 1e-13 * reach);
                if !(ft < loc.value) {
                    return Ok(Some(y));
                }
                y = exp(&y, &(&dir * t));
            }
        }
    }
    Err(Error::numeric(
        format!("Newton prox solver did not converge; best iterate {y:?}"),
        Some(total(space, &terms, &y)),
    ))
}
