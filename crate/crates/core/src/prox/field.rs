use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{prox, ConvexFunction};
use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::tangent::TangentVector;
use crate::tolerance::EPS_PROX;

type MapFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type JacobianFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// A single-valued monotone map `Ã` on the coordinates of `ℝⁿ`, standing for
/// the vector field `x ↦ γ_{x, x + Ãx}`.
#[derive(Clone)]
pub enum EuclideanMap {
    /// `Ãz = Mz + b` with `M + Mᵀ` positive semidefinite.
    Affine {
        matrix: DMatrix<f64>,
        offset: DVector<f64>,
    },
    /// A general map with its Jacobian; monotonicity is the caller's claim.
    Custom {
        map: Arc<MapFn>,
        jacobian: Arc<JacobianFn>,
    },
}

impl fmt::Debug for EuclideanMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EuclideanMap::Affine { matrix, offset } => f
                .debug_struct("Affine")
                .field("matrix", matrix)
                .field("offset", offset)
                .finish(),
            EuclideanMap::Custom { .. } => f.write_str("Custom { .. }"),
        }
    }
}

impl EuclideanMap {
    /// Affine map, rejected unless its symmetric part is positive semidefinite.
    pub fn affine(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != offset.len() {
            return Err(Error::domain(format!(
                "affine map needs a square matrix matching the offset, got {}x{} and {}",
                matrix.nrows(),
                matrix.ncols(),
                offset.len()
            )));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().min();
        if min_eig < -1e-12 * (1.0 + matrix.norm()) {
            return Err(Error::domain(format!(
                "affine map is not monotone: symmetric part has eigenvalue {min_eig}"
            )));
        }
        Ok(EuclideanMap::Affine { matrix, offset })
    }

    /// The constant map `Ãz = b`; it has no zeros unless `b = 0`.
    pub fn constant(offset: DVector<f64>) -> Self {
        let n = offset.len();
        EuclideanMap::Affine {
            matrix: DMatrix::zeros(n, n),
            offset,
        }
    }

    pub fn custom<F, J>(map: F, jacobian: J) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        J: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        EuclideanMap::Custom {
            map: Arc::new(map),
            jacobian: Arc::new(jacobian),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            EuclideanMap::Affine { offset, .. } => Some(offset.len()),
            EuclideanMap::Custom { .. } => None,
        }
    }

    pub fn apply(&self, z: &DVector<f64>) -> DVector<f64> {
        match self {
            EuclideanMap::Affine { matrix, offset } => matrix * z + offset,
            EuclideanMap::Custom { map, .. } => map(z),
        }
    }

    pub fn jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        match self {
            EuclideanMap::Affine { matrix, .. } => matrix.clone(),
            EuclideanMap::Custom { jacobian, .. } => jacobian(z),
        }
    }

    /// Solves `z + λÃz = x` by damped Newton iteration.
    pub fn resolve(&self, lambda: f64, x: &DVector<f64>) -> Result<DVector<f64>> {
        let n = x.len();
        if let Some(d) = self.dim() {
            if d != n {
                return Err(Error::domain(format!(
                    "map acts on dimension {d} but the point has dimension {n}"
                )));
            }
        }
        let residual = |z: &DVector<f64>| z + self.apply(z) * lambda - x;
        // z + λÃz = x bounds every term by |x| + |z|.
        let scale = |z: &DVector<f64>| 1.0 + x.norm() + z.norm();
        let mut z = x.clone();
        let mut r = residual(&z);
        let mut rn = r.norm();
        for _ in 0..100 {
            if !(rn.is_finite() && scale(&z).is_finite()) {
                return Err(Error::numeric("resolvent residual overflowed", Some(rn)));
            }
            if rn <= 1e-14 * scale(&z) {
                break;
            }
            let jac = DMatrix::identity(n, n) + self.jacobian(&z) * lambda;
            let Some(step) = jac.lu().solve(&r) else {
                return Err(Error::numeric("singular Newton system in resolvent", Some(rn)));
            };
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-12 {
                let cand = &z - &step * t;
                let rc = residual(&cand);
                let rcn = rc.norm();
                if rcn < rn {
                    z = cand;
                    r = rc;
                    rn = rcn;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if !(rn <= EPS_PROX * scale(&z)) {
            return Err(Error::numeric(
                format!("resolvent Newton iteration stalled at {:?}", z.as_slice()),
                Some(rn),
            ));
        }
        Ok(z)
    }
}

/// A monotone vector field satisfying the surjectivity condition.
///
/// Set-valued fields are carried by a single-valued selection.
#[derive(Debug, Clone)]
pub enum VectorField<P> {
    Subdifferential(ConvexFunction<P>),
    EuclideanMap(EuclideanMap),
}

impl<P: Clone> VectorField<P> {
    pub fn validate<S: HadamardSpace<Point = P> + ?Sized>(&self, space: &S) -> Result<()> {
        match self {
            VectorField::Subdifferential(f) => f.validate(space),
            VectorField::EuclideanMap(m) => {
                let fits = match m.dim() {
                    Some(d) => space.from_coordinates(&DVector::zeros(d)).is_some(),
                    None => space.name() == "euclidean",
                };
                if fits {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "this Euclidean map cannot act on the {} space",
                        space.name()
                    )))
                }
            }
        }
    }
}

fn euclidean_coordinates<S: HadamardSpace + ?Sized>(
    space: &S,
    x: &S::Point,
) -> Result<DVector<f64>> {
    space.coordinates(x).ok_or_else(|| {
        Error::domain(format!(
            "a Euclidean map cannot act on the {} space",
            space.name()
        ))
    })
}

/// `J_λx`: the unique `z` with `(1/λ)γ_{z,x} ∈ Az`.
pub fn resolvent<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    x: &S::Point,
) -> Result<S::Point> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!(
            "resolvent parameter λ = {lambda} must be positive"
        )));
    }
    match field {
        VectorField::Subdifferential(f) => prox(space, f, lambda, x),
        VectorField::EuclideanMap(m) => {
            let coords = euclidean_coordinates(space, x)?;
            let z = m.resolve(lambda, &coords)?;
            space
                .from_coordinates(&z)
                .ok_or_else(|| Error::domain("resolvent left the space"))
        }
    }
}

/// The resolvent point `z = J_λw` together with the graph element
/// `(1/λ)γ_{z,w} ∈ Az` it certifies.
pub fn resolvent_pair<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    lambda: f64,
    w: &S::Point,
) -> Result<(S::Point, TangentVector<S::Point>)> {
    let z = resolvent(space, field, lambda, w)?;
    let v = TangentVector::new(space, z.clone(), 1.0 / lambda, w.clone())?;
    Ok((z, v))
}

/// A tangent vector at `x` selected from `Ax`.
///
/// Subgradients of distance-type functions point away from the reference
/// point along an extension of the geodesic through `x`; where no extension
/// exists (a tree leaf) the subdifferential is empty and `x` is outside the
/// domain.
pub fn selection<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    x: &S::Point,
) -> Result<TangentVector<S::Point>> {
    match field {
        VectorField::EuclideanMap(m) => {
            let coords = euclidean_coordinates(space, x)?;
            let image = m.apply(&coords);
            let anchor = space
                .from_coordinates(&(coords + image))
                .ok_or_else(|| Error::domain("selection left the space"))?;
            TangentVector::new(space, x.clone(), 1.0, anchor)
        }
        VectorField::Subdifferential(f) => subgradient(space, f, x),
    }
}

/// Unit-length-per-`len` vector at `x` pointing away from `q`.
fn away_from<S: HadamardSpace + ?Sized>(
    space: &S,
    q: &S::Point,
    x: &S::Point,
    len: f64,
) -> Result<TangentVector<S::Point>> {
    let anchor = space.extend_geodesic(q, x, 1.0).ok_or_else(|| {
        Error::NotInDomain(format!("no geodesic from {q:?} extends past {x:?}"))
    })?;
    let reach = space.distance(x, &anchor);
    if reach == 0.0 {
        return Err(Error::NotInDomain(format!("no room to extend past {x:?}")));
    }
    TangentVector::new(space, x.clone(), len / reach, anchor)
}

fn subgradient<S: HadamardSpace + ?Sized>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    x: &S::Point,
) -> Result<TangentVector<S::Point>> {
    match f {
        ConvexFunction::DistanceTo(q) => {
            if space.distance(x, q) <= space.tolerance() {
                Ok(TangentVector::zero(x.clone()))
            } else {
                away_from(space, q, x, 1.0)
            }
        }
        ConvexFunction::HalfSquaredDistanceTo(q) => {
            let d = space.distance(x, q);
            if d == 0.0 {
                Ok(TangentVector::zero(x.clone()))
            } else {
                away_from(space, q, x, d)
            }
        }
        ConvexFunction::IndicatorOf(set) => {
            if space.contains(set, x)? {
                Ok(TangentVector::zero(x.clone()))
            } else {
                Err(Error::NotInDomain(format!(
                    "{x:?} lies outside the {} set",
                    set.kind()
                )))
            }
        }
        ConvexFunction::WeightedSum(terms) => {
            let active: Vec<_> = terms.iter().filter(|(w, _)| *w > 0.0).collect();
            match active.as_slice() {
                [] => Ok(TangentVector::zero(x.clone())),
                [(w, g)] => subgradient(space, g, x)?.scaled(*w),
                _ => {
                    // Tangent vectors only add in linear tangent spaces.
                    let coords = space.coordinates(x).ok_or_else(|| {
                        Error::Unsupported(format!(
                            "subgradient of a sum in the {} space",
                            space.name()
                        ))
                    })?;
                    let mut total = DVector::zeros(coords.len());
                    for (w, g) in active {
                        let part = subgradient(space, g, x)?;
                        let anchor = space
                            .coordinates(part.anchor())
                            .expect("coordinates available");
                        total += (anchor - &coords) * (part.scale() * w);
                    }
                    let anchor = space
                        .from_coordinates(&(&coords + total))
                        .expect("coordinates available");
                    TangentVector::new(space, x.clone(), 1.0, anchor)
                }
            }
        }
    }
}
