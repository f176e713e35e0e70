use std::f64::consts::PI;

use rand::Rng;

use super::{JobSpec, PropertyResult, SuiteName, Tally};
use crate::geometry::{
    alexandrov_angle, alexandrov_lemma_gap, cauchy_schwarz_slack, cn_gap, comparison_angle,
    distance_convexity_slack, geodesic_parameterization_error,
};
use crate::sampling::{log_uniform, random_tree, PointSampler, SampleRng};
use crate::spaces::{Euclidean, HalfPlane};
use crate::tolerance::EPS_ANGLE;

const GAP_TOL: f64 = 1e-7;
const LEMMA_TOL: f64 = 1e-9;
const TREE_VERTICES: usize = 15;

pub(super) fn jobs(samples: usize) -> Vec<JobSpec> {
    vec![
        JobSpec {
            stream: 100,
            run: Box::new(move |mut rng| check_space(&Euclidean::new(3), samples, &mut rng)),
        },
        JobSpec {
            stream: 101,
            run: Box::new(move |mut rng| check_space(&HalfPlane, samples, &mut rng)),
        },
        JobSpec {
            stream: 102,
            run: Box::new(move |mut rng| {
                let tree = random_tree(&mut rng, TREE_VERTICES);
                check_space(&tree, samples, &mut rng)
            }),
        },
        JobSpec {
            stream: 103,
            run: Box::new(move |mut rng| vec![planar_lemma(samples, &mut rng)]),
        },
    ]
}

fn check_space<S: PointSampler>(space: &S, samples: usize, rng: &mut SampleRng) -> Vec<PropertyResult> {
    let mut cn = Tally::at_most("cn_inequality", GAP_TOL);
    let mut cs = Tally::at_most("cauchy_schwarz", GAP_TOL);
    let mut convex = Tally::at_most("distance_convexity", GAP_TOL);
    let mut param = Tally::below("geodesic_parameterization", GAP_TOL);
    let mut angle = Tally::at_most("angle_below_comparison", EPS_ANGLE);
    for _ in 0..samples {
        let [x, y, z, w] = [(); 4].map(|_| space.sample_point(rng));
        let alpha: f64 = rng.random();
        cn.record_result(cn_gap(space, &x, &y, &z, alpha).map(|g| -g));
        cs.record(-cauchy_schwarz_slack(space, &x, &y, &z, &w));
        convex.record_result(distance_convexity_slack(space, &x, &y, &z, alpha).map(|g| -g));
        let d = space.distance(&x, &y);
        let params = [(rng.random::<f64>() * d, rng.random::<f64>() * d), (0.0, d)];
        param.record(geodesic_parameterization_error(space, &x, &y, &params));
        angle.record_result(
            alexandrov_angle(space, &x, &y, &z).map(|a| a - comparison_angle(space, &x, &y, &z)),
        );
    }
    [cn, cs, convex, param, angle]
        .into_iter()
        .map(|t| t.finish(SuiteName::Geometry, space.name()))
        .collect()
}

/// Planar triples with `θ + θ' ≥ π`, drawn by angle.
fn planar_lemma(samples: usize, rng: &mut SampleRng) -> PropertyResult {
    let mut t = Tally::at_most("alexandrov_lemma", LEMMA_TOL);
    let polar = |r: f64, phi: f64| [r * phi.cos(), r * phi.sin()];
    let mut drawn = 0;
    while drawn < samples {
        let base: f64 = rng.random_range(-PI..PI);
        let theta: f64 = rng.random_range(0.0..=PI);
        let theta_prime: f64 = rng.random_range((PI - theta)..=PI);
        let side = |rng: &mut SampleRng| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let (s1, s2) = (side(rng), side(rng));
        let x = polar(log_uniform(rng, 0.01, 100.0), base + s1 * theta);
        let y = polar(log_uniform(rng, 0.01, 100.0), base);
        let z = polar(log_uniform(rng, 0.01, 100.0), base + s2 * theta_prime);
        // Rounding can push the realized angle sum just below π; such
        // triples fall outside the precondition and are redrawn.
        if let Ok(gap) = alexandrov_lemma_gap(x, y, z) {
            t.record(-gap);
            drawn += 1;
        }
    }
    t.finish(SuiteName::Geometry, "plane")
}
