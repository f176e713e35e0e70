//! Acceptance criteria 1–8. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line even when an earlier one fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hadamard_prox::algorithms::{
    check_schedule, run_halpern, run_mann, run_ppa, AlphaRule, GrowthCheck, Hypothesis, LambdaRule, Regime, RunConfig,
    ScheduleSpec, StopReason, Verdict,
};
use hadamard_prox::prox::{ConvexFunction, EuclideanMap, VectorField};
use hadamard_prox::spaces::{ConvexSet, Euclidean, HalfPlane, HalfPlanePoint, MetricTree};
use hadamard_prox::suite::{run_property_suite, SuiteReport};
use hadamard_prox::HadamardSpace;
use nalgebra::DVector;

const SEED: u64 = 20_240_601;

type Failures = Vec<String>;

macro_rules! require {
    ($fails:expr, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $fails.push(format!($($msg)+));
        }
    };
}

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

/// Checks that each named property ran on `samples` instances per listed
/// space with a tolerance no looser than the criterion, and passed.
fn expect_properties(
    fails: &mut Failures,
    report: &SuiteReport,
    samples: usize,
    expected: &[(&str, &[&str], f64)],
) {
    for &(prefix, spaces, bound) in expected {
        for &space in spaces {
            let hits: Vec<_> = report
                .properties
                .iter()
                .filter(|p| p.space == space && (p.property == prefix || p.property.starts_with(&format!("{prefix}/"))))
                .collect();
            require!(fails, !hits.is_empty(), "{prefix} missing for {space}");
            for p in hits {
                let name = format!("{}@{}", p.property, p.space);
                require!(fails, p.passed, "{name} failed: worst {:?}, tol {}", p.max_violation, p.tolerance);
                require!(fails, p.tolerance <= bound, "{name} tolerance {} looser than {bound}", p.tolerance);
                require!(fails, p.samples + p.skipped == samples, "{name} ran {} + {} samples", p.samples, p.skipped);
                if prefix != "monotonicity_selection" {
                    require!(fails, p.samples > 0, "{name} evaluated no samples");
                }
            }
        }
    }
    for p in report.failures() {
        fails.push(format!("{}@{} failed", p.property, p.space));
    }
}

const ALL: &[&str] = &["euclidean", "half_plane", "tree"];

fn geometry_suite(fails: &mut Failures) {
    let n = 10_000;
    let t = Instant::now();
    let report = run_property_suite("geometry", n, SEED).expect("suite runs");
    let elapsed = t.elapsed();
    expect_properties(
        fails,
        &report,
        n,
        &[
            ("cn_inequality", ALL, 1e-7),
            ("cauchy_schwarz", ALL, 1e-7),
            ("distance_convexity", ALL, 1e-7),
            ("geodesic_parameterization", ALL, 1e-7),
            ("alexandrov_lemma", &["plane"], 1e-9),
        ],
    );
    require!(fails, elapsed < Duration::from_secs(30), "took {elapsed:?}");
}

fn tangent_suite(fails: &mut Failures) {
    let n = 10_000;
    let report = run_property_suite("tangent", n, SEED).expect("suite runs");
    expect_properties(
        fails,
        &report,
        n,
        &[
            ("tangent_triangle_inequality", ALL, 1e-7),
            ("pairing_lower_bound", ALL, 1e-7),
            ("embedding_metric", &["euclidean"], 1e-9),
            ("embedding_pairing", &["euclidean"], 1e-9),
            ("pairing_limit_estimate", &["euclidean", "half_plane"], 1e-3),
        ],
    );
}

fn resolvent_suite(fails: &mut Failures) {
    let n = 1_000;
    let report = run_property_suite("resolvent", n, SEED).expect("suite runs");
    expect_properties(
        fails,
        &report,
        n,
        &[
            ("resolvent_identity", ALL, 1e-6),
            ("firm_nonspreading", ALL, 1e-7),
            ("firm_nonexpansive", ALL, 1e-7),
            ("resolvent_comparison", ALL, 1e-7),
            ("local_residual_ratio", ALL, 1e-7),
            ("monotonicity_selection", ALL, 1e-7),
            ("monotonicity_graph", ALL, 1e-7),
            ("linear_resolvent_oracle", &["euclidean"], 1e-10),
        ],
    );
}

fn ppa(fails: &mut Failures) {
    // ℝ¹, f = ½|·|², λ ≡ 1: x_n = 2^{−(n−1)}.
    let r1 = Euclidean::new(1);
    let quad = VectorField::Subdifferential(ConvexFunction::HalfSquaredDistanceTo(v(&[0.])));
    let unit = ScheduleSpec::new(LambdaRule::Constant { value: 1.0 }, AlphaRule::Zero);
    let cfg = RunConfig::new(v(&[1.]), 40, 1e-300).with_step_tol(0.0);
    let t = run_ppa(&r1, &quad, &unit, &cfg).expect("runs");
    require!(fails, t.iterates.len() == 40, "halving run has {} iterates", t.iterates.len());
    for (k, x) in t.iterates.iter().enumerate() {
        let oracle = 0.5f64.powi(k as i32);
        require!(fails, (x[0] - oracle).abs() <= 1e-12, "x_{} = {} vs {oracle}", k + 1, x[0]);
    }

    // Half-plane, f = ½ρ(·, 2i), x₁ = i: distances ln 2 · 2^{−(n−1)}.
    let q = HalfPlanePoint::new(0.0, 2.0);
    let hp = VectorField::Subdifferential(ConvexFunction::HalfSquaredDistanceTo(q));
    let cfg = RunConfig::new(HalfPlanePoint::new(0.0, 1.0), 1000, 1e-300).with_reference(q);
    let t = run_ppa(&HalfPlane, &hp, &unit, &cfg).expect("runs");
    for s in t.steps.iter().take(30) {
        let oracle = std::f64::consts::LN_2 * 0.5f64.powi(s.n as i32 - 1);
        let d = s.dist_ref.expect("reference");
        require!(fails, (d - oracle).abs() <= 1e-12 * (1.0 + oracle), "half-plane d_{} = {d} vs {oracle}", s.n);
    }

    let tree = MetricTree::from_edges([("o", "a", 1.0), ("o", "b", 2.0), ("o", "c", 1.5), ("c", "d", 1.0)]).unwrap();
    let p = |l: &str| tree.vertex(l).unwrap();
    let half_plane_cases = [
        (ConvexFunction::HalfSquaredDistanceTo(q), HalfPlanePoint::new(0.0, 1.0), q, 1.0),
        (ConvexFunction::DistanceTo(HalfPlanePoint::new(1.0, 3.0)), HalfPlanePoint::new(-2.0, 0.5), HalfPlanePoint::new(1.0, 3.0), 0.5),
        (
            ConvexFunction::IndicatorOf(ConvexSet::Singleton(HalfPlanePoint::new(0.5, 0.2))),
            HalfPlanePoint::new(4.0, 7.0),
            HalfPlanePoint::new(0.5, 0.2),
            2.0,
        ),
    ];
    for (f, start, zero, lambda) in half_plane_cases {
        let label = format!("half-plane {f:?}");
        known_zero(fails, &label, &HalfPlane, f, start, zero, lambda);
    }
    let tree_cases = [
        (ConvexFunction::HalfSquaredDistanceTo(p("b")), p("d"), p("b"), 1.0),
        (ConvexFunction::DistanceTo(p("d")), p("a"), p("d"), 0.3),
        (
            ConvexFunction::HalfSquaredDistanceTo(tree.point_on_edge(0, 0.25).unwrap()),
            p("b"),
            tree.point_on_edge(0, 0.25).unwrap(),
            0.7,
        ),
    ];
    for (f, start, zero, lambda) in tree_cases {
        let label = format!("tree {f:?}");
        known_zero(fails, &label, &tree, f, start, zero, lambda);
    }

    // Zer = ∅: the translation Ãz ≡ 1 on ℝ¹.
    let shift = VectorField::EuclideanMap(EuclideanMap::constant(v(&[1.])));
    let mut cfg = RunConfig::new(v(&[0.]), 10_000_000, 1e-12);
    cfg.record_points = false;
    cfg.divergence_radius = Some(1e6);
    let t = run_ppa(&r1, &shift, &unit, &cfg).expect("runs");
    require!(fails, t.stop == StopReason::Diverged, "translation stopped by {:?}", t.stop);
    require!(fails, t.last[0].abs() > 1e6, "translation ended at {}", t.last[0]);
    let monotone = t.steps.windows(2).all(|w| w[1].dist_start >= w[0].dist_start);
    require!(fails, monotone, "translation distance not monotone");
    let diverged_at = t.len();

    cfg.growth_check = Some(GrowthCheck { window: 100, min_rate: 1e-3 });
    let t = run_ppa(&r1, &shift, &unit, &cfg).expect("runs");
    require!(fails, t.stop == StopReason::LinearGrowth, "growth check stopped by {:?}", t.stop);
    require!(fails, t.len() * 100 < diverged_at, "growth detected after {} of {diverged_at} steps", t.len());

    // The same check leaves a bounded run alone.
    let t = run_ppa(&r1, &quad, &unit, &RunConfig { growth_check: cfg.growth_check, ..RunConfig::new(v(&[5.]), 1000, 1e-12) })
        .expect("runs");
    require!(fails, t.stop != StopReason::LinearGrowth, "bounded run flagged as growing");
}

fn known_zero<S: HadamardSpace>(
    fails: &mut Failures,
    label: &str,
    space: &S,
    f: ConvexFunction<S::Point>,
    start: S::Point,
    zero: S::Point,
    lambda: f64,
) {
    let field = VectorField::Subdifferential(f);
    let schedule = ScheduleSpec::new(LambdaRule::Constant { value: lambda }, AlphaRule::Zero);
    let cfg = RunConfig::new(start, 1000, 1e-12).with_reference(zero);
    match run_ppa(space, &field, &schedule, &cfg) {
        Ok(t) => {
            let tol = space.tolerance();
            let d = t.final_dist_ref.expect("reference");
            require!(fails, d < 1e-6, "{label}: distance {d} after {} steps", t.len());
            let fejer = t.max_fejer_increase().unwrap_or(0.0);
            require!(fails, fejer <= tol, "{label}: Fejér increase {fejer}");
            let res = t.max_residual_increase().unwrap_or(0.0);
            require!(fails, res <= tol, "{label}: residual increase {res}");
        }
        Err(e) => fails.push(format!("{label}: {e}")),
    }
}

fn mann(fails: &mut Failures) {
    let r1 = Euclidean::new(1);
    let quad = VectorField::Subdifferential(ConvexFunction::HalfSquaredDistanceTo(v(&[0.])));
    let half = ScheduleSpec::new(LambdaRule::Constant { value: 1.0 }, AlphaRule::Constant { value: 0.5 });
    let cfg = RunConfig::new(v(&[1.]), 60, 1e-300).with_step_tol(0.0);
    let t = run_mann(&r1, &quad, &half, &cfg).expect("runs");
    for (k, w) in t.iterates.windows(2).enumerate() {
        require!(fails, (w[1][0] - 0.75 * w[0][0]).abs() <= 1e-12, "x_{} = {} vs ¾x_{}", k + 2, w[1][0], k + 1);
    }
    for (k, x) in t.iterates.iter().enumerate() {
        let oracle = 0.75f64.powi(k as i32);
        require!(fails, (x[0] - oracle).abs() <= 1e-12, "x_{} = {} vs {oracle}", k + 1, x[0]);
    }

    // α ≡ 0 is the proximal point iteration, bit for bit.
    let tree = MetricTree::from_edges([("o", "a", 1.0), ("o", "b", 2.0), ("o", "c", 1.5)]).unwrap();
    let schedules = [
        LambdaRule::Constant { value: 0.7 },
        LambdaRule::Harmonic { scale: 3.0 },
        LambdaRule::Linear { scale: 0.2 },
    ];
    for lambda in schedules {
        let s = ScheduleSpec::new(lambda, AlphaRule::Zero);
        same_trace(fails, &r1, &quad, &s, v(&[2.5]));
        let hp = VectorField::Subdifferential(ConvexFunction::WeightedSum(vec![
            (1.0, ConvexFunction::DistanceTo(HalfPlanePoint::new(0.0, 1.0))),
            (0.5, ConvexFunction::HalfSquaredDistanceTo(HalfPlanePoint::new(1.0, 2.0))),
        ]));
        same_trace(fails, &HalfPlane, &hp, &s, HalfPlanePoint::new(-1.0, 0.3));
        let tf = VectorField::Subdifferential(ConvexFunction::DistanceTo(tree.vertex("b").unwrap()));
        same_trace(fails, &tree, &tf, &s, tree.vertex("a").unwrap());
    }
}

fn same_trace<S: HadamardSpace>(
    fails: &mut Failures,
    space: &S,
    field: &VectorField<S::Point>,
    schedule: &ScheduleSpec,
    start: S::Point,
) {
    let cfg = RunConfig::new(start, 200, 1e-12);
    match (run_ppa(space, field, schedule, &cfg), run_mann(space, field, schedule, &cfg)) {
        (Ok(a), Ok(b)) => {
            let same = a.steps == b.steps && a.iterates == b.iterates && a.resolvents == b.resolvents && a.last == b.last;
            require!(fails, same, "{}: α ≡ 0 Mann trace differs from PPA", space.name());
        }
        (a, b) => fails.push(format!("{}: {:?} / {:?}", space.name(), a.err(), b.err())),
    }
}

fn halpern(fails: &mut Failures) {
    let r2 = Euclidean::new(2);
    let set = ConvexSet::Segment(v(&[-1., 0.]), v(&[1., 0.]));
    // Projection oracle: clamp the first coordinate, drop the second.
    let anchor = v(&[2., 3.]);
    let target = v(&[anchor[0].clamp(-1.0, 1.0), 0.0]);
    let field = VectorField::Subdifferential(ConvexFunction::IndicatorOf(set));
    let schedule = ScheduleSpec::new(LambdaRule::Linear { scale: 1.0 }, AlphaRule::HarmonicShifted);
    let mut last = f64::INFINITY;
    for (n, bound) in [(10_000, 5e-2), (100_000, 1e-2)] {
        let mut cfg = RunConfig::new(v(&[0., 0.]), n, 1e-300)
            .with_anchor(anchor.clone())
            .with_reference(target.clone())
            .with_step_tol(0.0);
        cfg.record_points = false;
        let t0 = Instant::now();
        match run_halpern(&r2, &field, &schedule, &cfg) {
            Ok(t) => {
                let elapsed = t0.elapsed();
                let d = t.final_dist_ref.expect("reference");
                require!(fails, t.len() == n, "N = {n}: stopped after {} steps ({:?})", t.len(), t.stop);
                require!(fails, d < bound, "N = {n}: ρ(x_N, (1,0)) = {d}");
                require!(fails, d < last, "N = {n}: no improvement ({d} vs {last})");
                require!(fails, elapsed < Duration::from_secs(60), "N = {n}: took {elapsed:?}");
                last = d;
            }
            Err(e) => fails.push(format!("N = {n}: {e}")),
        }
    }
}

fn verdict(regime: Regime, schedule: &ScheduleSpec, horizon: usize, h: Hypothesis) -> Option<Verdict> {
    let report = check_schedule(regime, schedule, horizon).ok()?;
    report.checks.iter().find(|c| c.hypothesis == h).map(|c| c.verdict)
}

fn schedule_checker(fails: &mut Failures) {
    let inverse_square = ScheduleSpec::new(LambdaRule::Power { scale: 1.0, exponent: -2.0 }, AlphaRule::Zero);
    let harmonic = ScheduleSpec::new(LambdaRule::Constant { value: 1.0 }, AlphaRule::HarmonicShifted);
    let cases = [
        (Regime::PpaConvergence, &inverse_square, Hypothesis::SumLambdaSquaredDiverges, Verdict::Violated),
        (Regime::HalpernBoundedLambda, &harmonic, Hypothesis::AlphaToZero, Verdict::Satisfied),
        (Regime::HalpernBoundedLambda, &harmonic, Hypothesis::SumAlphaDiverges, Verdict::Satisfied),
        (Regime::HalpernGrowingLambda, &harmonic, Hypothesis::AlphaToZero, Verdict::Satisfied),
        (Regime::HalpernGrowingLambda, &harmonic, Hypothesis::SumAlphaDiverges, Verdict::Satisfied),
    ];
    for (regime, schedule, h, expected) in cases {
        for horizon in [1_000, 10_000] {
            let got = verdict(regime, schedule, horizon, h);
            require!(fails, got == Some(expected), "{regime:?}/{h:?} at {horizon}: {got:?}");
        }
    }
    let whole = |h| check_schedule(Regime::PpaConvergence, &inverse_square, h).map(|r| r.verdict).ok();
    require!(fails, whole(1_000) == Some(Verdict::Violated), "1/n² regime verdict {:?}", whole(1_000));
    for regime in Regime::ALL {
        for schedule in [&inverse_square, &harmonic] {
            let at = |h| check_schedule(regime, schedule, h).map(|r| r.checks.iter().map(|c| c.verdict).collect::<Vec<_>>());
            require!(fails, at(1_000).ok() == at(10_000).ok(), "{regime:?} verdicts change between horizons");
        }
    }
}

const CONFIGS: [&str; 9] = [
    "euclidean_ppa",
    "euclidean_mann",
    "euclidean_halpern",
    "half_plane_ppa",
    "half_plane_mann",
    "half_plane_halpern",
    "tree_ppa",
    "tree_mann",
    "tree_halpern",
];

fn copy_configs(to: &Path) {
    let from = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(from).expect("configs directory") {
        let path = entry.expect("entry").path();
        if path.is_file() {
            std::fs::copy(&path, to.join(path.file_name().unwrap())).expect("copy");
        }
    }
}

fn cli(fails: &mut Failures) {
    let runs: Vec<_> = (0..2).map(|_| tempfile::tempdir().expect("tempdir")).collect();
    for dir in &runs {
        copy_configs(dir.path());
    }
    for name in CONFIGS {
        let mut traces = Vec::new();
        for dir in &runs {
            let out = Command::new(env!("CARGO_BIN_EXE_hadamard-prox"))
                .arg("run")
                .arg(dir.path().join(format!("{name}.json")))
                .output()
                .expect("binary runs");
            require!(fails, out.status.code() == Some(0), "{name}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
            let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
            require!(fails, summary["status"] == "completed", "{name}: status {}", summary["status"]);
            traces.push(std::fs::read(dir.path().join(format!("out/{name}.csv"))).unwrap_or_default());
        }
        require!(fails, !traces[0].is_empty(), "{name}: empty trace");
        require!(fails, traces[0] == traces[1], "{name}: traces differ between runs");
    }
}

fn main() {
    let criteria: [(&str, fn(&mut Failures)); 8] = [
        ("geometry suite", geometry_suite),
        ("tangent suite", tangent_suite),
        ("resolvent suite", resolvent_suite),
        ("proximal point", ppa),
        ("Mann", mann),
        ("Halpern", halpern),
        ("schedule checker", schedule_checker),
        ("CLI examples", cli),
    ];
    let mut all_passed = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let mut fails = Vec::new();
        let t = Instant::now();
        check(&mut fails);
        let elapsed = t.elapsed().as_secs_f64();
        let status = if fails.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {} ({name}) [{elapsed:.1}s]", i + 1);
        for f in fails.iter().take(20) {
            println!("    {f}");
        }
        all_passed &= fails.is_empty();
    }
    if !all_passed {
        std::process::exit(1);
    }
}
