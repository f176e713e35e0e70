use crate::geometry::HadamardSpace;

use super::{JobSpec, PropertyResult, SuiteName, Tally};
use crate::error::Result;
use crate::geometry::quasilinearize;
use crate::sampling::{log_uniform, random_tree, PointSampler, SampleRng};
use crate::spaces::{Euclidean, HalfPlane};
use crate::tangent::{euclid_embed, pairing_limit_estimate, tangent_metric, tangent_pairing, TangentVector};

const GAP_TOL: f64 = 1e-7;
const EMBED_TOL: f64 = 1e-9;
const LIMIT_EPS: f64 = 1e-4;
const LIMIT_TOL: f64 = 1e-3;
/// The finite-ε error grows like `ε·ρ(p,y)²·ρ(p,x)`, so the absolute bound
/// is checked on triples within this radius of `p`.
const LIMIT_RADIUS: f64 = 2.0;

pub(super) fn jobs(samples: usize) -> Vec<JobSpec> {
    vec![
        JobSpec {
            stream: 200,
            run: Box::new(move |mut rng| {
                let r3 = Euclidean::new(3);
                let mut out = check_space(&r3, samples, &mut rng);
                out.extend(embedding(&r3, samples, &mut rng));
                out.push(limit_formula(&r3, samples, &mut rng));
                out
            }),
        },
        JobSpec {
            stream: 201,
            run: Box::new(move |mut rng| {
                let mut out = check_space(&HalfPlane, samples, &mut rng);
                out.push(limit_formula(&HalfPlane, samples, &mut rng));
                out
            }),
        },
        JobSpec {
            stream: 202,
            run: Box::new(move |mut rng| {
                let tree = random_tree(&mut rng, 15);
                check_space(&tree, samples, &mut rng)
            }),
        },
    ]
}

fn scale(rng: &mut SampleRng) -> f64 {
    log_uniform(rng, 0.2, 5.0)
}

fn vector<S: PointSampler>(space: &S, base: &S::Point, rng: &mut SampleRng) -> Result<TangentVector<S::Point>> {
    let anchor = space.sample_point(rng);
    TangentVector::new(space, base.clone(), scale(rng), anchor)
}

fn check_space<S: PointSampler>(space: &S, samples: usize, rng: &mut SampleRng) -> Vec<PropertyResult> {
    let mut triangle = Tally::at_most("tangent_triangle_inequality", GAP_TOL);
    let mut lower = Tally::at_most("pairing_lower_bound", GAP_TOL);
    for _ in 0..samples {
        let p = space.sample_point(rng);
        let slack = (|| {
            let (u, v, w) = (vector(space, &p, rng)?, vector(space, &p, rng)?, vector(space, &p, rng)?);
            Ok(tangent_metric(space, &u, &v)? + tangent_metric(space, &v, &w)? - tangent_metric(space, &u, &w)?)
        })();
        triangle.record_result(slack.map(|s: f64| -s));

        let (x, y) = (space.sample_point(rng), space.sample_point(rng));
        let (a, b) = (scale(rng), scale(rng));
        let bound = (|| {
            let u = TangentVector::new(space, p.clone(), a, x.clone())?;
            let v = TangentVector::new(space, p.clone(), b, y.clone())?;
            Ok(tangent_pairing(space, &u, &v)? - a * b * quasilinearize(space, &p, &x, &p, &y))
        })();
        lower.record_result(bound.map(|g: f64| -g));
    }
    [triangle, lower]
        .into_iter()
        .map(|t| t.finish(SuiteName::Tangent, space.name()))
        .collect()
}

fn embedding(space: &Euclidean, samples: usize, rng: &mut SampleRng) -> Vec<PropertyResult> {
    let mut metric = Tally::below("embedding_metric", EMBED_TOL);
    let mut pairing = Tally::below("embedding_pairing", EMBED_TOL);
    for _ in 0..samples {
        let p = space.sample_point(rng);
        let check = (|| {
            let (u, v) = (vector(space, &p, rng)?, vector(space, &p, rng)?);
            let (tu, tv) = (euclid_embed(space, &u)?, euclid_embed(space, &v)?);
            let dm = (tangent_metric(space, &u, &v)? - (&tu - &tv).norm()).abs();
            let dp = (tangent_pairing(space, &u, &v)? - tu.dot(&tv)).abs();
            Ok((dm, dp))
        })();
        metric.record_result(check.clone().map(|c| c.0));
        pairing.record_result(check.map(|c| c.1));
    }
    vec![
        metric.finish(SuiteName::Tangent, space.name()),
        pairing.finish(SuiteName::Tangent, space.name()),
    ]
}

/// `|(1/ε)⟨px, p((1−ε)p ⊕ εy)⟩ − g_p(γ_{p,x}, γ_{p,y})|` at `ε = 10⁻⁴`,
/// with `x` and `y` pulled to within [`LIMIT_RADIUS`] of `p`.
fn limit_formula<S: PointSampler>(space: &S, samples: usize, rng: &mut SampleRng) -> PropertyResult {
    let mut t = Tally::below("pairing_limit_estimate", LIMIT_TOL);
    for _ in 0..samples {
        let [p, x, y] = [(); 3].map(|_| space.sample_point(rng));
        let x = space.geodesic_point(&p, &x, LIMIT_RADIUS);
        let y = space.geodesic_point(&p, &y, LIMIT_RADIUS);
        let err = (|| {
            let u = TangentVector::new(space, p.clone(), 1.0, x.clone())?;
            let v = TangentVector::new(space, p.clone(), 1.0, y.clone())?;
            let exact = tangent_pairing(space, &u, &v)?;
            Ok((pairing_limit_estimate(space, &p, &x, &y, LIMIT_EPS)? - exact).abs())
        })();
        t.record_result(err);
    }
    t.finish(SuiteName::Tangent, space.name())
}
