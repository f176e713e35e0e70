use nalgebra::{DMatrix, DVector};

use super::{mismatch, project_common, ConvexSet};
use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::tolerance::EPS_GEOM_EUCLIDEAN;

/// Real coordinate space `ℝⁿ` with the Euclidean norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    /// # Panics
    /// If `dim == 0`.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "Euclidean space needs dimension at least 1");
        Self { dim }
    }

    pub fn try_new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("Euclidean dimension must be at least 1"));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_len(&self, v: &DVector<f64>, what: &str) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::domain(format!(
                "{what} has dimension {} but the space has dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

impl HadamardSpace for Euclidean {
    type Point = DVector<f64>;

    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn tolerance(&self) -> f64 {
        EPS_GEOM_EUCLIDEAN
    }

    fn validate(&self, p: &DVector<f64>) -> Result<()> {
        self.check_len(p, "point")?;
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("point has non-finite coordinates"));
        }
        Ok(())
    }

    fn distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x - y).norm()
    }

    fn geodesic_point(&self, x: &DVector<f64>, y: &DVector<f64>, s: f64) -> DVector<f64> {
        let d = self.distance(x, y);
        if s <= 0.0 || d == 0.0 {
            return x.clone();
        }
        if s >= d {
            return y.clone();
        }
        x + (y - x) * (s / d)
    }

    fn extend_geodesic(
        &self,
        from: &DVector<f64>,
        through: &DVector<f64>,
        t: f64,
    ) -> Option<DVector<f64>> {
        let dir = through - from;
        let d = dir.norm();
        if d == 0.0 {
            return None;
        }
        Some(through + dir * (t / d))
    }

    fn exact_angle(&self, p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> Option<f64> {
        let u = x - p;
        let v = y - p;
        // Kahan's form stays accurate for nearly parallel vectors.
        let (a, b) = (&u * v.norm(), &v * u.norm());
        Some(2.0 * (&a - &b).norm().atan2((a + b).norm()))
    }

    fn project(&self, set: &ConvexSet<DVector<f64>>, x: &DVector<f64>) -> Result<DVector<f64>> {
        if let Some(p) = project_common(self, set, x) {
            return p;
        }
        match set {
            ConvexSet::Segment(a, b) => {
                let ab = b - a;
                let len2 = ab.norm_squared();
                if len2 == 0.0 {
                    return Ok(a.clone());
                }
                let t = ((x - a).dot(&ab) / len2).clamp(0.0, 1.0);
                Ok(a + ab * t)
            }
            ConvexSet::Halfspace { normal, offset } => {
                self.check_len(normal, "halfspace normal")?;
                let n2 = normal.norm_squared();
                if n2 == 0.0 {
                    return Err(Error::domain("halfspace normal must be nonzero"));
                }
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    Ok(x.clone())
                } else {
                    Ok(x - normal * (excess / n2))
                }
            }
            ConvexSet::Affine { origin, directions } => {
                self.check_len(origin, "affine origin")?;
                let basis = orthonormal_basis(directions, self.dim)?;
                let rel = x - origin;
                let mut out = origin.clone();
                for q in &basis {
                    out += q * q.dot(&rel);
                }
                Ok(out)
            }
            ConvexSet::Box { lower, upper } => {
                self.check_len(lower, "box lower corner")?;
                self.check_len(upper, "box upper corner")?;
                if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
                    return Err(Error::domain("box has lower > upper"));
                }
                Ok(DVector::from_iterator(
                    self.dim,
                    x.iter()
                        .zip(lower.iter().zip(upper.iter()))
                        .map(|(c, (l, u))| c.clamp(*l, *u)),
                ))
            }
            other => Err(mismatch("euclidean", other)),
        }
    }

    fn coordinates(&self, p: &DVector<f64>) -> Option<DVector<f64>> {
        Some(p.clone())
    }

    fn from_coordinates(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        (v.len() == self.dim).then(|| v.clone())
    }

    fn curvature(&self) -> Option<f64> {
        Some(0.0)
    }

    fn log_map(&self, z: &DVector<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
        Some(y - z)
    }

    fn exp_map(&self, z: &DVector<f64>, v: &DVector<f64>) -> Option<DVector<f64>> {
        (v.len() == self.dim).then(|| z + v)
    }

    fn direction_probes(&self, z: &DVector<f64>, r: f64) -> Vec<DVector<f64>> {
        let n = self.dim;
        let mut dirs: Vec<DVector<f64>> = Vec::new();
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            dirs.push(e);
        }
        // Diagonals let the search slide along kinks that are not axis aligned.
        for i in 0..n {
            for j in (i + 1)..n {
                for sign in [1.0, -1.0] {
                    let mut e = DVector::zeros(n);
                    e[i] = std::f64::consts::FRAC_1_SQRT_2;
                    e[j] = sign * std::f64::consts::FRAC_1_SQRT_2;
                    dirs.push(e);
                }
            }
        }
        dirs.into_iter()
            .flat_map(|d| [z + &d * r, z - &d * r])
            .collect()
    }
}

fn orthonormal_basis(directions: &[DVector<f64>], dim: usize) -> Result<Vec<DVector<f64>>> {
    if directions.is_empty() {
        return Ok(Vec::new());
    }
    if directions.iter().any(|d| d.len() != dim) {
        return Err(Error::domain("affine direction has the wrong dimension"));
    }
    let m = DMatrix::from_columns(directions);
    let qr = m.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let scale = m.norm().max(1.0);
    Ok((0..r.nrows().min(r.ncols()))
        .filter(|&i| r[(i, i)].abs() > 1e-12 * scale)
        .map(|i| q.column(i).into_owned())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn halfspace_projection() {
        let r2 = Euclidean::new(2);
        let c = ConvexSet::Halfspace {
            normal: v(&[0., 1.]),
            offset: 0.0,
        };
        assert_eq!(r2.project(&c, &v(&[2., 3.])).unwrap(), v(&[2., 0.]));
        assert_eq!(r2.project(&c, &v(&[2., -3.])).unwrap(), v(&[2., -3.]));
    }

    #[test]
    fn affine_and_box_projection() {
        let r3 = Euclidean::new(3);
        let plane = ConvexSet::Affine {
            origin: v(&[0., 0., 1.]),
            directions: vec![v(&[1., 0., 0.]), v(&[1., 1., 0.]), v(&[2., 1., 0.])],
        };
        let p = r3.project(&plane, &v(&[3., -2., 7.])).unwrap();
        assert_abs_diff_eq!((p - v(&[3., -2., 1.])).norm(), 0.0, epsilon = 1e-12);

        let b = ConvexSet::Box {
            lower: v(&[-1., 0., 0.]),
            upper: v(&[1., 0., 2.]),
        };
        assert_eq!(r3.project(&b, &v(&[2., 3., 1.])).unwrap(), v(&[1., 0., 1.]));
    }

    #[test]
    fn segment_and_ball_projection() {
        let r2 = Euclidean::new(2);
        let seg = ConvexSet::Segment(v(&[-1., 0.]), v(&[1., 0.]));
        assert_eq!(r2.project(&seg, &v(&[2., 3.])).unwrap(), v(&[1., 0.]));
        let ball = ConvexSet::Ball {
            center: v(&[0., 0.]),
            radius: 1.0,
        };
        let p = r2.project(&ball, &v(&[3., 4.])).unwrap();
        assert_abs_diff_eq!((p - v(&[0.6, 0.8])).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn subtree_is_a_mismatch() {
        let r2 = Euclidean::new(2);
        let set = ConvexSet::Subtree {
            vertices: vec!["a".into()],
        };
        assert!(matches!(r2.project(&set, &v(&[0., 0.])), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_angle_matches_inner_product() {
        let r2 = Euclidean::new(2);
        let a = r2
            .exact_angle(&v(&[0., 0.]), &v(&[1., 0.]), &v(&[1., 1.]))
            .unwrap();
        assert_abs_diff_eq!(a, std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
    }
}
