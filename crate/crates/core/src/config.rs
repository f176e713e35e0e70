//! JSON experiment configurations: validation, `run` and `check`.
//!
//! A config has four blocks. Points are written per space: a number array
//! in `ℝⁿ`, `[re, im]` in the half-plane, and in a tree either a vertex
//! label `"a"` or `{"edge": ["a", "b"], "offset": t}` with `t` measured from
//! `a`. `start` and `anchor` also accept `"random"`, drawn from the seed.
//!
//! ```json
//! {
//!   "space": {"name": "euclidean", "dimension": 1},
//!   "problem": {
//!     "field": {"kind": "half_squared_distance", "point": [0.0]},
//!     "reference": [0.0]
//!   },
//!   "algorithm": {
//!     "kind": "ppa",
//!     "schedule": {"lambda": {"rule": "constant", "value": 1.0}},
//!     "start": [1.0],
//!     "max_iter": 100,
//!     "residual_tol": 1e-10
//!   },
//!   "output": {"trace": "ppa.csv", "summary": "ppa.json", "seed": 1}
//! }
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algorithms::{
    check_schedule, halpern_regime, run_algorithm, Algorithm, GrowthCheck, IterationTrace, Regime, RunConfig,
    ScheduleReport, ScheduleSpec, StopReason,
};
use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::prox::{resolvent, ConvexFunction, EuclideanMap, VectorField};
use crate::sampling::{rng, PointSampler};
use crate::spaces::{ConvexSet, Euclidean, HalfPlane, HalfPlanePoint, MetricTree, TreePoint};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Euclidean {
        dimension: usize,
    },
    HalfPlane,
    /// Either `edges`, a path to a `u v length` edge-list file, or an inline
    /// `edge_list`.
    Tree {
        #[serde(default)]
        edges: Option<PathBuf>,
        #[serde(default)]
        edge_list: Option<Vec<(String, String, f64)>>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Singleton { point: Value },
    Ball { center: Value, radius: f64 },
    Segment { from: Value, to: Value },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Affine { origin: Vec<f64>, directions: Vec<Vec<f64>> },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Subtree { vertices: Vec<String> },
}

/// A vector field: the subdifferential of a convex function, or a monotone
/// map on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Distance { point: Value },
    HalfSquaredDistance { point: Value },
    Indicator { set: SetSpec },
    /// Only function kinds may appear as terms.
    WeightedSum { terms: Vec<TermSpec> },
    /// `z ↦ Mz + b`, matrix given row by row.
    AffineMap { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    ConstantMap { offset: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub weight: f64,
    pub function: FieldSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub field: FieldSpec,
    #[serde(default)]
    pub reference: Option<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub window: usize,
    pub min_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub kind: Algorithm,
    pub schedule: ScheduleSpec,
    pub start: Value,
    #[serde(default)]
    pub anchor: Option<Value>,
    pub max_iter: usize,
    pub residual_tol: f64,
    /// Defaults to the space tolerance; `0` disables the step rule.
    #[serde(default)]
    pub step_tol: Option<f64>,
    #[serde(default)]
    pub divergence_radius: Option<f64>,
    #[serde(default)]
    pub growth_check: Option<GrowthSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub trace: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub space: SpaceSpec,
    pub problem: ProblemSpec,
    pub algorithm: AlgorithmSpec,
    pub output: OutputSpec,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
}

fn block<T: DeserializeOwned>(root: &mut serde_json::Map<String, Value>, name: &str) -> Result<T> {
    let value = root
        .remove(name)
        .ok_or_else(|| Error::config(name, "missing block"))?;
    serde_json::from_value(value).map_err(|e| Error::config(name, e.to_string()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        let Value::Object(mut root) = root else {
            return Err(Error::config("config", "expected a JSON object"));
        };
        let space = block(&mut root, "space")?;
        let problem = block(&mut root, "problem")?;
        let algorithm = block(&mut root, "algorithm")?;
        let output = match root.remove("output") {
            Some(v) => serde_json::from_value(v).map_err(|e| Error::config("output", e.to_string()))?,
            None => OutputSpec::default(),
        };
        if let Some(extra) = root.keys().next() {
            return Err(Error::config(extra.as_str(), "unknown block"));
        }
        Ok(Self {
            space,
            problem,
            algorithm,
            output,
            base_dir: base_dir.into(),
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, dir)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Schedule regimes reported for the configured algorithm.
    pub fn regimes(&self) -> &'static [Regime] {
        match self.algorithm.kind {
            Algorithm::Ppa => &[Regime::PpaBounded, Regime::PpaConvergence],
            Algorithm::Mann => &[Regime::MannBounded, Regime::MannConvergence],
            Algorithm::Halpern => &[Regime::HalpernGrowingLambda, Regime::HalpernBoundedLambda],
        }
    }
}

/// The model spaces a config can name, with the JSON point format of each.
trait ConfigSpace: PointSampler {
    fn parse_point(&self, v: &Value, field: &str) -> Result<Self::Point>;
    fn point_json(&self, p: &Self::Point) -> Value;
}

fn numbers(v: &Value, field: &str) -> Result<Vec<f64>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::config(field, "expected an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| Error::config(format!("{field}[{i}]"), "expected a number"))
        })
        .collect()
}

impl ConfigSpace for Euclidean {
    fn parse_point(&self, v: &Value, field: &str) -> Result<DVector<f64>> {
        let xs = numbers(v, field)?;
        if xs.len() != self.dim() {
            return Err(Error::config(
                field,
                format!("expected {} coordinates, got {}", self.dim(), xs.len()),
            ));
        }
        Ok(DVector::from_vec(xs))
    }

    fn point_json(&self, p: &DVector<f64>) -> Value {
        json!(p.as_slice())
    }
}

impl ConfigSpace for HalfPlane {
    fn parse_point(&self, v: &Value, field: &str) -> Result<HalfPlanePoint> {
        match numbers(v, field)?.as_slice() {
            &[re, im] => HalfPlanePoint::try_new(re, im).map_err(|e| Error::config(field, e.to_string())),
            xs => Err(Error::config(field, format!("expected [re, im], got {} numbers", xs.len()))),
        }
    }

    fn point_json(&self, p: &HalfPlanePoint) -> Value {
        json!([p.re, p.im])
    }
}

impl ConfigSpace for MetricTree {
    fn parse_point(&self, v: &Value, field: &str) -> Result<TreePoint> {
        let vertex = |label: &str, f: &str| {
            self.vertex_id(label)
                .ok_or_else(|| Error::config(f, format!("unknown vertex `{label}`")))
        };
        match v {
            Value::String(label) => vertex(label, field).map(TreePoint::Vertex),
            Value::Object(map) => {
                let ends = map
                    .get("edge")
                    .and_then(Value::as_array)
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::config(format!("{field}.edge"), "expected [\"u\", \"v\"]"))?;
                let label = |i: usize| {
                    ends[i]
                        .as_str()
                        .ok_or_else(|| Error::config(format!("{field}.edge[{i}]"), "expected a vertex label"))
                };
                let (u, w) = (
                    vertex(label(0)?, &format!("{field}.edge[0]"))?,
                    vertex(label(1)?, &format!("{field}.edge[1]"))?,
                );
                let t = map
                    .get("offset")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::config(format!("{field}.offset"), "expected a number"))?;
                if let Some(k) = map.keys().find(|k| *k != "edge" && *k != "offset") {
                    return Err(Error::config(format!("{field}.{k}"), "unknown field"));
                }
                let edge = self.edge_between(u, w).ok_or_else(|| {
                    Error::config(format!("{field}.edge"), format!("no edge joins `{}` and `{}`", self.label(u), self.label(w)))
                })?;
                let e = &self.edges()[edge];
                let offset = if e.from == u { t } else { e.length - t };
                self.point_on_edge(edge, offset)
                    .map_err(|err| Error::config(format!("{field}.offset"), err.to_string()))
            }
            _ => Err(Error::config(field, "expected a vertex label or {\"edge\": [u, v], \"offset\": t}")),
        }
    }

    fn point_json(&self, p: &TreePoint) -> Value {
        match *p {
            TreePoint::Vertex(v) => json!(self.label(v)),
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges()[edge];
                json!({"edge": [self.label(e.from), self.label(e.to)], "offset": offset})
            }
        }
    }
}

fn vector(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn build_set<S: ConfigSpace>(space: &S, spec: &SetSpec, field: &str) -> Result<ConvexSet<S::Point>> {
    Ok(match spec {
        SetSpec::Singleton { point } => ConvexSet::Singleton(space.parse_point(point, &format!("{field}.point"))?),
        SetSpec::Ball { center, radius } => {
            if !(radius.is_finite() && *radius >= 0.0) {
                return Err(Error::config(format!("{field}.radius"), "must be a nonnegative number"));
            }
            ConvexSet::Ball {
                center: space.parse_point(center, &format!("{field}.center"))?,
                radius: *radius,
            }
        }
        SetSpec::Segment { from, to } => ConvexSet::Segment(
            space.parse_point(from, &format!("{field}.from"))?,
            space.parse_point(to, &format!("{field}.to"))?,
        ),
        SetSpec::Halfspace { normal, offset } => ConvexSet::Halfspace {
            normal: vector(normal),
            offset: *offset,
        },
        SetSpec::Affine { origin, directions } => ConvexSet::Affine {
            origin: vector(origin),
            directions: directions.iter().map(|d| vector(d)).collect(),
        },
        SetSpec::Box { lower, upper } => ConvexSet::Box {
            lower: vector(lower),
            upper: vector(upper),
        },
        SetSpec::Subtree { vertices } => ConvexSet::Subtree {
            vertices: vertices.clone(),
        },
    })
}

fn build_function<S: ConfigSpace>(space: &S, spec: &FieldSpec, field: &str) -> Result<ConvexFunction<S::Point>> {
    Ok(match spec {
        FieldSpec::Distance { point } => ConvexFunction::DistanceTo(space.parse_point(point, &format!("{field}.point"))?),
        FieldSpec::HalfSquaredDistance { point } => {
            ConvexFunction::HalfSquaredDistanceTo(space.parse_point(point, &format!("{field}.point"))?)
        }
        FieldSpec::Indicator { set } => ConvexFunction::IndicatorOf(build_set(space, set, &format!("{field}.set"))?),
        FieldSpec::WeightedSum { terms } => {
            let mut out = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let path = format!("{field}.terms[{i}]");
                if !(t.weight.is_finite() && t.weight >= 0.0) {
                    return Err(Error::config(format!("{path}.weight"), "must be a nonnegative number"));
                }
                out.push((t.weight, build_function(space, &t.function, &format!("{path}.function"))?));
            }
            ConvexFunction::WeightedSum(out)
        }
        FieldSpec::AffineMap { .. } | FieldSpec::ConstantMap { .. } => {
            return Err(Error::config(
                format!("{field}.kind"),
                "a Euclidean map is not a convex function and cannot be a sum term",
            ))
        }
    })
}

fn indicator_sets<'a, P>(f: &'a ConvexFunction<P>, out: &mut Vec<&'a ConvexSet<P>>) {
    match f {
        ConvexFunction::IndicatorOf(s) => out.push(s),
        ConvexFunction::WeightedSum(terms) => terms.iter().for_each(|(_, g)| indicator_sets(g, out)),
        _ => {}
    }
}

fn build_field<S: ConfigSpace>(space: &S, spec: &FieldSpec) -> Result<VectorField<S::Point>> {
    const FIELD: &str = "problem.field";
    let map = |m: Result<EuclideanMap>| -> Result<VectorField<S::Point>> {
        let field = VectorField::EuclideanMap(m.map_err(|e| Error::config(FIELD, e.to_string()))?);
        field.validate(space).map_err(|e| Error::config(FIELD, e.to_string()))?;
        Ok(field)
    };
    match spec {
        FieldSpec::AffineMap { matrix, offset } => {
            let n = matrix.len();
            if let Some(i) = matrix.iter().position(|row| row.len() != n) {
                return Err(Error::config(format!("{FIELD}.matrix[{i}]"), format!("expected {n} entries")));
            }
            let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
            map(EuclideanMap::affine(m, vector(offset)))
        }
        FieldSpec::ConstantMap { offset } => map(Ok(EuclideanMap::constant(vector(offset)))),
        _ => {
            let f = build_function(space, spec, FIELD)?;
            f.validate(space).map_err(|e| Error::config(FIELD, e.to_string()))?;
            Ok(VectorField::Subdifferential(f))
        }
    }
}

enum AnySpace {
    Euclidean(Euclidean),
    HalfPlane(HalfPlane),
    Tree(MetricTree),
}

macro_rules! dispatch {
    ($space:expr, $s:ident => $body:expr) => {
        match $space {
            AnySpace::Euclidean($s) => $body,
            AnySpace::HalfPlane($s) => $body,
            AnySpace::Tree($s) => $body,
        }
    };
}

fn build_space(config: &ExperimentConfig) -> Result<AnySpace> {
    Ok(match &config.space {
        SpaceSpec::Euclidean { dimension } => AnySpace::Euclidean(
            Euclidean::try_new(*dimension).map_err(|e| Error::config("space.dimension", e.to_string()))?,
        ),
        SpaceSpec::HalfPlane => AnySpace::HalfPlane(HalfPlane),
        SpaceSpec::Tree { edges, edge_list } => {
            let tree = match (edges, edge_list) {
                (Some(path), None) => {
                    let path = config.resolve(path);
                    let text = fs::read_to_string(&path)
                        .map_err(|e| Error::config("space.edges", format!("cannot read {}: {e}", path.display())))?;
                    MetricTree::from_edge_list(&text).map_err(|e| Error::config("space.edges", e.to_string()))?
                }
                (None, Some(list)) => MetricTree::from_edges(list.iter().map(|(u, v, l)| (u.as_str(), v.as_str(), *l)))
                    .map_err(|e| Error::config("space.edge_list", e.to_string()))?,
                _ => return Err(Error::config("space", "a tree needs exactly one of `edges` and `edge_list`")),
            };
            AnySpace::Tree(tree)
        }
    })
}

/// Everything a run needs, checked against the space.
struct Prepared<S: HadamardSpace> {
    field: VectorField<S::Point>,
    run: RunConfig<S::Point>,
    schedule: ScheduleSpec,
}

fn parse_or_sample<S: ConfigSpace>(space: &S, v: &Value, field: &str, rng: &mut crate::sampling::SampleRng) -> Result<S::Point> {
    if v.as_str() == Some("random") {
        Ok(space.sample_point(rng))
    } else {
        space.parse_point(v, field)
    }
}

fn prepare<S: ConfigSpace>(space: &S, config: &ExperimentConfig) -> Result<Prepared<S>> {
    let alg = &config.algorithm;
    let field = build_field(space, &config.problem.field)?;
    let mut rng = rng(config.output.seed);
    let start = parse_or_sample(space, &alg.start, "algorithm.start", &mut rng)?;
    let anchor = match (&alg.anchor, alg.kind) {
        (Some(v), Algorithm::Halpern) => Some(parse_or_sample(space, v, "algorithm.anchor", &mut rng)?),
        (None, Algorithm::Halpern) => return Err(Error::config("algorithm.anchor", "Halpern iteration needs an anchor")),
        (Some(_), kind) => return Err(Error::config("algorithm.anchor", format!("{kind} iteration takes no anchor"))),
        (None, _) => None,
    };
    let reference = match &config.problem.reference {
        Some(v) => Some(space.parse_point(v, "problem.reference")?),
        None => None,
    };

    // Space-specific set descriptors are only checked on projection.
    if let VectorField::Subdifferential(f) = &field {
        let mut sets = Vec::new();
        indicator_sets(f, &mut sets);
        for set in sets {
            space
                .project(set, &start)
                .map_err(|e| Error::config("problem.field", e.to_string()))?;
        }
    }

    let schedule = alg.schedule.clone();
    schedule.validate().map_err(|e| match e {
        Error::Config { field, message } => Error::config(format!("algorithm.{field}"), message),
        other => other,
    })?;
    if alg.max_iter == 0 {
        return Err(Error::config("algorithm.max_iter", "must be positive"));
    }
    if !(alg.residual_tol.is_finite() && alg.residual_tol > 0.0) {
        return Err(Error::config("algorithm.residual_tol", "must be a positive number"));
    }
    if let Some(t) = alg.step_tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::config("algorithm.step_tol", "must be a nonnegative number"));
        }
    }
    if let Some(r) = alg.divergence_radius {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::config("algorithm.divergence_radius", "must be a positive number"));
        }
    }
    if let Some(g) = alg.growth_check {
        if g.window == 0 || !(g.min_rate.is_finite() && g.min_rate > 0.0) {
            return Err(Error::config(
                "algorithm.growth_check",
                "window and min_rate must be positive",
            ));
        }
    }
    match alg.kind {
        Algorithm::Ppa if schedule.alpha != crate::algorithms::AlphaRule::Zero => {
            return Err(Error::config(
                "algorithm.schedule.alpha",
                "the proximal point iteration takes no averaging weights",
            ))
        }
        Algorithm::Mann => {
            if let Some(n) = (1..=alg.max_iter).find(|&n| schedule.alpha(n) >= 1.0) {
                return Err(Error::config(
                    "algorithm.schedule.alpha",
                    format!("Mann iteration needs α_n < 1, got α_{n} = {}", schedule.alpha(n)),
                ));
            }
        }
        Algorithm::Halpern => {
            halpern_regime(&schedule, alg.max_iter).map_err(|e| match e {
                Error::Config { message, .. } => Error::config("algorithm.schedule", message),
                other => other,
            })?;
        }
        Algorithm::Ppa => {}
    }

    // Unsupported field shapes surface on the first resolvent; report them
    // here rather than as a failed run.
    if let Err(e) = resolvent(space, &field, schedule.lambda(1), &start) {
        if !e.is_numeric() {
            return Err(Error::config("problem.field", e.to_string()));
        }
    }

    let run = RunConfig {
        start,
        anchor,
        max_iter: alg.max_iter,
        residual_tol: alg.residual_tol,
        step_tol: alg.step_tol,
        reference,
        record_points: false,
        divergence_radius: alg.divergence_radius,
        growth_check: alg.growth_check.map(|g| GrowthCheck {
            window: g.window,
            min_rate: g.min_rate,
        }),
    };
    Ok(Prepared { field, run, schedule })
}

/// Schedule verdicts for every regime of the configured algorithm, at
/// horizon `max_iter`.
pub fn check(config: &ExperimentConfig) -> Result<Vec<ScheduleReport>> {
    dispatch!(&build_space(config)?, space => prepare(space, config).map(drop))?;
    schedule_reports(config)
}

fn schedule_reports(config: &ExperimentConfig) -> Result<Vec<ScheduleReport>> {
    config
        .regimes()
        .iter()
        .map(|&r| check_schedule(r, &config.algorithm.schedule, config.algorithm.max_iter))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// The solver failed; the trace holds the steps completed before it.
    Failed,
}

/// The structured record written to `output.summary`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub space: String,
    pub algorithm: Algorithm,
    pub regime: Option<Regime>,
    pub stop_reason: Option<StopReason>,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub final_dist_ref: Option<f64>,
    /// The last iterate produced; absent after a failure.
    pub final_point: Option<Value>,
    pub seed: u64,
    pub schedule_checks: Vec<ScheduleReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The config is invalid; nothing was written.
    Validation,
    /// The solver failed mid-run; the partial trace and summary were written.
    Numeric,
    /// An output file could not be written.
    Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFailure {
    pub kind: FailureKind,
    pub error: Error,
    /// Present when the run itself failed.
    pub summary: Option<ExperimentSummary>,
}

impl std::fmt::Display for ExperimentFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.summary {
            Some(s) => write!(f, "{} (after {} steps)", self.error, s.iterations),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for ExperimentFailure {}

fn validation(error: Error) -> ExperimentFailure {
    ExperimentFailure {
        kind: FailureKind::Validation,
        error,
        summary: None,
    }
}

fn output_error(error: Error) -> ExperimentFailure {
    ExperimentFailure {
        kind: FailureKind::Output,
        error,
        summary: None,
    }
}

/// Validates the config, runs it, and writes the CSV trace and JSON summary
/// named in the output block.
///
/// Nothing is written when validation fails. When the solver fails mid-run
/// the partial trace and a summary with status `failed` are still written.
pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<ExperimentSummary, ExperimentFailure> {
    let space = build_space(config).map_err(validation)?;
    dispatch!(&space, s => execute(s, config))
}

fn execute<S: ConfigSpace>(
    space: &S,
    config: &ExperimentConfig,
) -> std::result::Result<ExperimentSummary, ExperimentFailure> {
    let prepared = prepare(space, config).map_err(validation)?;
    let checks = schedule_reports(config).map_err(validation)?;
    let outcome = run_algorithm(
        config.algorithm.kind,
        space,
        &prepared.field,
        &prepared.schedule,
        &prepared.run,
    );
    let (trace, failure) = match outcome {
        Ok(t) => (t, None),
        Err(f) => match f.partial {
            Some(t) => (t, Some(f.error)),
            None => return Err(validation(f.error)),
        },
    };
    let summary = summarize(space, config, &trace, failure.as_ref(), checks);
    write_outputs(config, &trace, &summary).map_err(output_error)?;
    match failure {
        None => Ok(summary),
        Some(error) => Err(ExperimentFailure {
            kind: FailureKind::Numeric,
            error,
            summary: Some(summary),
        }),
    }
}

fn summarize<S: ConfigSpace>(
    space: &S,
    config: &ExperimentConfig,
    trace: &IterationTrace<S::Point>,
    failure: Option<&Error>,
    schedule_checks: Vec<ScheduleReport>,
) -> ExperimentSummary {
    let failed = failure.is_some();
    ExperimentSummary {
        status: if failed { RunStatus::Failed } else { RunStatus::Completed },
        error: failure.map(ToString::to_string),
        space: space.name().to_string(),
        algorithm: trace.algorithm,
        regime: trace.regime,
        stop_reason: (!failed).then_some(trace.stop),
        iterations: trace.len(),
        final_residual: trace.final_residual(),
        final_dist_ref: if failed {
            trace.steps.last().and_then(|s| s.dist_ref)
        } else {
            trace.final_dist_ref
        },
        final_point: (!failed).then(|| space.point_json(&trace.last)),
        seed: config.output.seed,
        schedule_checks,
    }
}

fn write_outputs<P>(config: &ExperimentConfig, trace: &IterationTrace<P>, summary: &ExperimentSummary) -> Result<()> {
    let create = |p: &Path| -> Result<BufWriter<fs::File>> {
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        Ok(BufWriter::new(fs::File::create(p)?))
    };
    if let Some(p) = &config.output.trace {
        trace.write_csv(create(&config.resolve(p))?)?;
    }
    if let Some(p) = &config.output.summary {
        let mut text = serde_json::to_string_pretty(summary).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        let path = config.resolve(p);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, text)?;
    }
    Ok(())
}
