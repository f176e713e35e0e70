//! C ABI over `hadamard-prox`.
//!
//! Spaces are opaque `HpSpace` handles. Points cross the boundary as `double`
//! arrays of [`hp_space_point_len`] entries: the coordinates in `ℝⁿ`,
//! `[re, im]` in the half-plane, and `[edge, offset]` in a tree, with the
//! edge index stored as a double and the offset measured from the edge's
//! first endpoint in the edge list.
//!
//! Every fallible call returns an `HpStatus`; the message of the last error
//! on the calling thread is available through [`hp_last_error_message`].
//! The header is `include/hadamard_prox.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hadamard_prox::config::{run_experiment, ExperimentConfig, FailureKind};
use hadamard_prox::geometry::{alexandrov_angle, comparison_angle, convex_combination};
use hadamard_prox::prox::{prox, ConvexFunction};
use hadamard_prox::spaces::{ConvexSet, Euclidean, HalfPlane, HalfPlanePoint, MetricTree, TreePoint};
use hadamard_prox::{Error, HadamardSpace};
use nalgebra::DVector;

pub type HpStatus = i32;

pub const HP_OK: HpStatus = 0;
/// A required pointer argument was null.
pub const HP_ERR_NULL: HpStatus = 1;
/// An argument is outside the domain of the operation.
pub const HP_ERR_DOMAIN: HpStatus = 2;
/// An iterative solver failed.
pub const HP_ERR_NUMERIC: HpStatus = 3;
/// An experiment config is invalid.
pub const HP_ERR_CONFIG: HpStatus = 4;
/// A Rust panic was caught at the boundary.
pub const HP_ERR_PANIC: HpStatus = 5;
/// An output file could not be written.
pub const HP_ERR_IO: HpStatus = 6;

/// `ρ(·, anchor)`
pub const HP_FN_DISTANCE: i32 = 0;
/// `½ρ(·, anchor)²`
pub const HP_FN_HALF_SQUARED_DISTANCE: i32 = 1;
/// Indicator of the closed ball of `radius` around `anchor`.
pub const HP_FN_INDICATOR_BALL: i32 = 2;

enum Inner {
    Euclidean(Euclidean),
    HalfPlane(HalfPlane),
    Tree(MetricTree),
}

/// Opaque space handle.
pub struct HpSpace(Inner);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> HpStatus {
    match e {
        Error::Numeric { .. } => HP_ERR_NUMERIC,
        Error::Config { .. } => HP_ERR_CONFIG,
        Error::Io(_) => HP_ERR_IO,
        _ => HP_ERR_DOMAIN,
    }
}

struct Fail(HpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HP_ERR_NULL, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HP_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside hadamard-prox".to_string());
            HP_ERR_PANIC
        }
    }
}

fn handle(f: impl FnOnce() -> Result<Inner, Fail>) -> *mut HpSpace {
    let mut out = ptr::null_mut();
    guard(|| {
        out = Box::into_raw(Box::new(HpSpace(f()?)));
        Ok(())
    });
    out
}

/// Encoding of points as `double` arrays.
trait Codec: HadamardSpace {
    fn point_len(&self) -> usize;
    fn decode(&self, xs: &[f64]) -> Result<Self::Point, Error>;
    fn encode(&self, p: &Self::Point, out: &mut [f64]);
}

impl Codec for Euclidean {
    fn point_len(&self) -> usize {
        self.dim()
    }

    fn decode(&self, xs: &[f64]) -> Result<DVector<f64>, Error> {
        let p = DVector::from_column_slice(xs);
        self.validate(&p)?;
        Ok(p)
    }

    fn encode(&self, p: &DVector<f64>, out: &mut [f64]) {
        out.copy_from_slice(p.as_slice());
    }
}

impl Codec for HalfPlane {
    fn point_len(&self) -> usize {
        2
    }

    fn decode(&self, xs: &[f64]) -> Result<HalfPlanePoint, Error> {
        HalfPlanePoint::try_new(xs[0], xs[1])
    }

    fn encode(&self, p: &HalfPlanePoint, out: &mut [f64]) {
        out.copy_from_slice(&[p.re, p.im]);
    }
}

impl Codec for MetricTree {
    fn point_len(&self) -> usize {
        2
    }

    fn decode(&self, xs: &[f64]) -> Result<TreePoint, Error> {
        let e = xs[0];
        if !(e >= 0.0 && e.fract() == 0.0 && e < self.edges().len() as f64) {
            return Err(Error::domain(format!("{e} is not an edge index")));
        }
        self.point_on_edge(e as usize, xs[1])
    }

    fn encode(&self, p: &TreePoint, out: &mut [f64]) {
        let (e, t) = self.edge_coordinates(p);
        out.copy_from_slice(&[e as f64, t]);
    }
}

macro_rules! dispatch {
    ($space:expr, $s:ident => $body:expr) => {
        match &$space.0 {
            Inner::Euclidean($s) => $body,
            Inner::HalfPlane($s) => $body,
            Inner::Tree($s) => $body,
        }
    };
}

unsafe fn space_ref<'a>(space: *const HpSpace) -> Result<&'a HpSpace, Fail> {
    space.as_ref().ok_or_else(|| null("space"))
}

unsafe fn point<S: Codec>(s: &S, xs: *const c_double, what: &str) -> Result<S::Point, Fail> {
    if xs.is_null() {
        return Err(null(what));
    }
    let xs = std::slice::from_raw_parts(xs, s.point_len());
    Ok(s.decode(xs)?)
}

unsafe fn out_slice<'a>(out: *mut c_double, len: usize) -> Result<&'a mut [f64], Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    Ok(std::slice::from_raw_parts_mut(out, len))
}

unsafe fn out_scalar<'a>(out: *mut c_double) -> Result<&'a mut f64, Fail> {
    out.as_mut().ok_or_else(|| null("out"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(HP_ERR_DOMAIN, format!("`{what}` is not valid UTF-8")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Static version string.
#[no_mangle]
pub extern "C" fn hp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `ℝⁿ` with `n = dim ≥ 1`; null on error.
#[no_mangle]
pub extern "C" fn hp_space_euclidean(dim: usize) -> *mut HpSpace {
    handle(|| Ok(Inner::Euclidean(Euclidean::try_new(dim)?)))
}

#[no_mangle]
pub extern "C" fn hp_space_half_plane() -> *mut HpSpace {
    handle(|| Ok(Inner::HalfPlane(HalfPlane)))
}

/// A metric tree from `u v length` lines; null on error.
///
/// # Safety
/// `edge_list` must be null or a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hp_space_tree(edge_list: *const c_char) -> *mut HpSpace {
    handle(|| {
        let text = c_str(edge_list, "edge_list")?;
        Ok(Inner::Tree(MetricTree::from_edge_list(text)?))
    })
}

/// # Safety
/// `space` must be null or a handle from an `hp_space_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn hp_space_free(space: *mut HpSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of doubles in a point of `space`; 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hp_space_point_len(space: *const HpSpace) -> usize {
    match space.as_ref() {
        Some(s) => dispatch!(s, s => s.point_len()),
        None => 0,
    }
}

/// Writes the encoding of the tree vertex `label` to `out`.
///
/// # Safety
/// `space` must be live, `label` nul-terminated, `out` valid for 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn hp_tree_vertex(space: *const HpSpace, label: *const c_char, out: *mut c_double) -> HpStatus {
    guard(|| {
        let Inner::Tree(tree) = &space_ref(space)?.0 else {
            return Err(Fail(HP_ERR_DOMAIN, "not a tree space".into()));
        };
        let p = tree.vertex(c_str(label, "label")?)?;
        tree.encode(&p, out_slice(out, 2)?);
        Ok(())
    })
}

/// `ρ(x, y)`.
///
/// # Safety
/// `space` must be live; `x`, `y` valid for `hp_space_point_len` doubles;
/// `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn hp_distance(
    space: *const HpSpace,
    x: *const c_double,
    y: *const c_double,
    out: *mut c_double,
) -> HpStatus {
    guard(|| {
        dispatch!(space_ref(space)?, s => {
            let (x, y) = (point(s, x, "x")?, point(s, y, "y")?);
            *out_scalar(out)? = s.distance(&x, &y);
        });
        Ok(())
    })
}

/// `(1 − α)x ⊕ αy` for `α ∈ [0, 1]`.
///
/// # Safety
/// As [`hp_distance`], with `out` valid for one point.
#[no_mangle]
pub unsafe extern "C" fn hp_convex_combination(
    space: *const HpSpace,
    x: *const c_double,
    y: *const c_double,
    alpha: c_double,
    out: *mut c_double,
) -> HpStatus {
    guard(|| {
        dispatch!(space_ref(space)?, s => {
            let (x, y) = (point(s, x, "x")?, point(s, y, "y")?);
            let m = convex_combination(s, &x, &y, alpha)?;
            s.encode(&m, out_slice(out, s.point_len())?);
        });
        Ok(())
    })
}

/// Comparison angle at `p` of the triangle `(p, x, y)`.
///
/// # Safety
/// As [`hp_distance`].
#[no_mangle]
pub unsafe extern "C" fn hp_comparison_angle(
    space: *const HpSpace,
    p: *const c_double,
    x: *const c_double,
    y: *const c_double,
    out: *mut c_double,
) -> HpStatus {
    guard(|| {
        dispatch!(space_ref(space)?, s => {
            let (p, x, y) = (point(s, p, "p")?, point(s, x, "x")?, point(s, y, "y")?);
            *out_scalar(out)? = comparison_angle(s, &p, &x, &y);
        });
        Ok(())
    })
}

/// Alexandrov angle at `p` between the geodesics to `x` and `y`.
///
/// # Safety
/// As [`hp_distance`].
#[no_mangle]
pub unsafe extern "C" fn hp_alexandrov_angle(
    space: *const HpSpace,
    p: *const c_double,
    x: *const c_double,
    y: *const c_double,
    out: *mut c_double,
) -> HpStatus {
    guard(|| {
        dispatch!(space_ref(space)?, s => {
            let (p, x, y) = (point(s, p, "p")?, point(s, x, "x")?, point(s, y, "y")?);
            *out_scalar(out)? = alexandrov_angle(s, &p, &x, &y)?;
        });
        Ok(())
    })
}

/// Proximal point of `λf` at `x` for `f` selected by `kind` (`HP_FN_*`).
/// `radius` is read only for `HP_FN_INDICATOR_BALL`.
///
/// # Safety
/// As [`hp_convex_combination`], with `anchor` valid for one point.
#[no_mangle]
pub unsafe extern "C" fn hp_prox(
    space: *const HpSpace,
    kind: i32,
    anchor: *const c_double,
    radius: c_double,
    lambda: c_double,
    x: *const c_double,
    out: *mut c_double,
) -> HpStatus {
    guard(|| {
        dispatch!(space_ref(space)?, s => {
            let q = point(s, anchor, "anchor")?;
            let f = match kind {
                HP_FN_DISTANCE => ConvexFunction::DistanceTo(q),
                HP_FN_HALF_SQUARED_DISTANCE => ConvexFunction::HalfSquaredDistanceTo(q),
                HP_FN_INDICATOR_BALL => ConvexFunction::IndicatorOf(ConvexSet::Ball { center: q, radius }),
                other => return Err(Fail(HP_ERR_DOMAIN, format!("unknown function kind {other}"))),
            };
            let z = prox(s, &f, lambda, &point(s, x, "x")?)?;
            s.encode(&z, out_slice(out, s.point_len())?);
        });
        Ok(())
    })
}

/// Runs a JSON experiment config; relative paths in it resolve against
/// `base_dir` (null for the working directory).
///
/// On `HP_OK` and on `HP_ERR_NUMERIC` (solver failure, partial trace
/// written) `*summary_json` receives the summary, to be released with
/// [`hp_string_free`]; otherwise it is set to null.
///
/// # Safety
/// `config_json` and `base_dir` must be null or nul-terminated;
/// `summary_json` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn hp_run_experiment(
    config_json: *const c_char,
    base_dir: *const c_char,
    summary_json: *mut *mut c_char,
) -> HpStatus {
    guard(|| {
        let out = summary_json.as_mut().ok_or_else(|| null("summary_json"))?;
        *out = ptr::null_mut();
        let text = c_str(config_json, "config_json")?;
        let dir = if base_dir.is_null() { "" } else { c_str(base_dir, "base_dir")? };
        let config = ExperimentConfig::from_json(text, dir)?;
        let json = |s| serde_json::to_string(s).expect("serializable");
        match run_experiment(&config) {
            Ok(summary) => {
                *out = c_string(json(&summary));
                Ok(())
            }
            Err(failure) => {
                if let Some(summary) = &failure.summary {
                    *out = c_string(json(summary));
                }
                let code = match failure.kind {
                    FailureKind::Validation => HP_ERR_CONFIG,
                    FailureKind::Numeric => HP_ERR_NUMERIC,
                    FailureKind::Output => HP_ERR_IO,
                };
                Err(Fail(code, failure.error.to_string()))
            }
        }
    })
}

/// Copy of the last error message on this thread, or null if there is none.
/// Release it with [`hp_string_free`].
#[no_mangle]
pub extern "C" fn hp_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(ptr::null_mut(), c_string))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_codec_round_trips() {
        let tree = MetricTree::from_edge_list("u v 2.0\nv w 1.0\n").unwrap();
        let p = tree.decode(&[1.0, 0.25]).unwrap();
        let mut out = [0.0; 2];
        tree.encode(&p, &mut out);
        assert_eq!(tree.distance(&p, &tree.decode(&out).unwrap()), 0.0);
        assert!(tree.decode(&[0.5, 0.0]).is_err());
        assert!(tree.decode(&[-1.0, 0.0]).is_err());
    }

    #[test]
    fn panics_become_status_codes() {
        assert_eq!(guard(|| panic!("boom")), HP_ERR_PANIC);
        assert_eq!(guard(|| Err(Error::domain("x").into())), HP_ERR_DOMAIN);
    }
}
