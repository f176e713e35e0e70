use rand::Rng;

use super::{JobSpec, PropertyResult, SuiteName, Tally};
use crate::algorithms::{run_halpern, run_mann, run_ppa, AlphaRule, LambdaRule, RunConfig, ScheduleSpec};
use crate::error::Result;
use crate::prox::{ConvexFunction, VectorField};
use crate::sampling::{log_uniform, random_tree, PointSampler, SampleRng};
use crate::spaces::{ConvexSet, Euclidean, HalfPlane};

const ITERATIONS: usize = 200;
const HALPERN_SHORT: usize = 100;
const HALPERN_LONG: usize = 1000;

pub(super) fn jobs(samples: usize) -> Vec<JobSpec> {
    vec![
        JobSpec {
            stream: 400,
            run: Box::new(move |mut rng| check_space(&Euclidean::new(2), samples, &mut rng)),
        },
        JobSpec {
            stream: 401,
            run: Box::new(move |mut rng| check_space(&HalfPlane, samples, &mut rng)),
        },
        JobSpec {
            stream: 402,
            run: Box::new(move |mut rng| {
                let tree = random_tree(&mut rng, 15);
                check_space(&tree, samples, &mut rng)
            }),
        },
    ]
}

fn lambda_rule(rng: &mut SampleRng) -> LambdaRule {
    let c = log_uniform(rng, 0.1, 5.0);
    match rng.random_range(0..3) {
        0 => LambdaRule::Constant { value: c },
        1 => LambdaRule::Harmonic { scale: c },
        _ => LambdaRule::Linear { scale: c },
    }
}

fn field_with_zero<S: PointSampler>(space: &S, rng: &mut SampleRng) -> (VectorField<S::Point>, S::Point) {
    let q = space.sample_point(rng);
    let f = if rng.random_bool(0.5) {
        ConvexFunction::DistanceTo(q.clone())
    } else {
        ConvexFunction::HalfSquaredDistanceTo(q.clone())
    };
    (VectorField::Subdifferential(f), q)
}

fn check_space<S: PointSampler>(space: &S, samples: usize, rng: &mut SampleRng) -> Vec<PropertyResult> {
    let tol = space.tolerance();
    let mut fejer_ppa = Tally::at_most("fejer_ppa", tol);
    let mut residual_ppa = Tally::at_most("residual_monotone_ppa", tol);
    let mut fejer_mann = Tally::at_most("fejer_mann", tol);
    let mut degenerate = Tally::at_most("mann_zero_alpha_is_ppa", 0.0);
    let mut halpern = Tally::at_most("halpern_improves_with_horizon", tol);

    for _ in 0..samples {
        let (field, zero) = field_with_zero(space, rng);
        let start = space.sample_point(rng);
        let config = RunConfig::new(start.clone(), ITERATIONS, 1e-12).with_reference(zero.clone());
        let ppa_schedule = ScheduleSpec::new(lambda_rule(rng), AlphaRule::Zero);

        let ppa = run_ppa(space, &field, &ppa_schedule, &config);
        match &ppa {
            Ok(t) => {
                fejer_ppa.record(t.max_fejer_increase().unwrap_or(0.0));
                residual_ppa.record(t.max_residual_increase().unwrap_or(0.0));
            }
            Err(e) => {
                fejer_ppa.record_result(Err(e.error.clone()));
                residual_ppa.record_result(Err(e.error.clone()));
            }
        }
        match (&ppa, run_mann(space, &field, &ppa_schedule, &config)) {
            (Ok(a), Ok(b)) => {
                let same = a.steps == b.steps && a.iterates == b.iterates && a.last == b.last;
                degenerate.record(if same { 0.0 } else { 1.0 });
            }
            (Err(e), _) => degenerate.record_result(Err(e.error.clone())),
            (_, Err(e)) => degenerate.record_result(Err(e.error)),
        }

        let mann_schedule = ScheduleSpec::new(lambda_rule(rng), AlphaRule::Constant { value: rng.random_range(0.0..0.9) });
        match run_mann(space, &field, &mann_schedule, &config) {
            Ok(t) => fejer_mann.record(t.max_fejer_increase().unwrap_or(0.0)),
            Err(e) => fejer_mann.record_result(Err(e.error)),
        }

        halpern.record_result(halpern_gain(space, rng));
    }
    [fejer_ppa, residual_ppa, fejer_mann, degenerate, halpern]
        .into_iter()
        .map(|t| t.finish(SuiteName::Algorithms, space.name()))
        .collect()
}

/// `ρ(x_{N₂}, Pv) − ρ(x_{N₁}, Pv)` for `N₁ < N₂` on a projection problem.
fn halpern_gain<S: PointSampler>(space: &S, rng: &mut SampleRng) -> Result<f64> {
    let (a, b) = (space.sample_point(rng), space.sample_point(rng));
    let set = ConvexSet::Segment(a, b);
    let anchor = space.sample_point(rng);
    let target = space.project(&set, &anchor)?;
    let field = VectorField::Subdifferential(ConvexFunction::IndicatorOf(set));
    let schedule = ScheduleSpec::new(LambdaRule::Linear { scale: 1.0 }, AlphaRule::HarmonicShifted);
    let start = space.sample_point(rng);
    let run = |n| -> Result<f64> {
        let mut config = RunConfig::new(start.clone(), n, 1e-300)
            .with_anchor(anchor.clone())
            .with_reference(target.clone())
            .with_step_tol(0.0);
        config.record_points = false;
        let t = run_halpern(space, &field, &schedule, &config).map_err(|f| f.error)?;
        Ok(t.final_dist_ref.expect("reference supplied"))
    };
    Ok(run(HALPERN_LONG)? - run(HALPERN_SHORT)?)
}
