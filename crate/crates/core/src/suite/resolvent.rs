use nalgebra::DVector;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{JobSpec, PropertyResult, SuiteName, Tally};
use crate::error::Result;
use crate::geometry::{convex_combination, HadamardSpace};
use crate::prox::{
    firm_nonexpansive_slack, firm_nonspread_gap, graph_monotonicity_gap, local_residual_ratio,
    monotonicity_gap, moreau_objective, prox, prox_from, prox_optimality_gap, resolvent, resolvent_comparison_gap,
    resolvent_identity_residual, resolvent_pair, ConvexFunction, EuclideanMap, VectorField,
};
use crate::sampling::{log_uniform, monotone_matrix, random_tree, PointSampler, SampleRng};
use crate::spaces::{ConvexSet, Euclidean, HalfPlane, MetricTree};
use crate::tolerance::{EPS_IDENTITY, EPS_PROX};

const GAP_TOL: f64 = 1e-7;
const ORACLE_TOL: f64 = 1e-10;
const RANDOM_CANDIDATES: usize = 1000;
const PERTURBATIONS: usize = 100;

/// Function shapes exercised in every space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Distance,
    HalfSquared,
    Ball,
    Segment,
    Halfspace,
    Subtree,
    Sum,
    LinearMap,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Distance => "distance",
            Kind::HalfSquared => "half_squared_distance",
            Kind::Ball => "indicator_ball",
            Kind::Segment => "indicator_segment",
            Kind::Halfspace => "indicator_halfspace",
            Kind::Subtree => "indicator_subtree",
            Kind::Sum => "weighted_sum",
            Kind::LinearMap => "affine_map",
        }
    }
}

/// A random field of a given kind together with one of its zeros, if known.
struct Instance<P> {
    field: VectorField<P>,
    zero: Option<P>,
}

trait FieldSampler: PointSampler {
    const KINDS: &'static [Kind];
    fn sample_set(&self, kind: Kind, rng: &mut SampleRng) -> (ConvexSet<Self::Point>, Self::Point);
    fn sample_map(&self, _rng: &mut SampleRng) -> Option<Instance<Self::Point>> {
        None
    }

    fn sample_instance(&self, kind: Kind, rng: &mut SampleRng) -> Instance<Self::Point> {
        let sub = |f| VectorField::Subdifferential(f);
        match kind {
            Kind::Distance => {
                let q = self.sample_point(rng);
                Instance { field: sub(ConvexFunction::DistanceTo(q.clone())), zero: Some(q) }
            }
            Kind::HalfSquared => {
                let q = self.sample_point(rng);
                Instance { field: sub(ConvexFunction::HalfSquaredDistanceTo(q.clone())), zero: Some(q) }
            }
            Kind::Sum => {
                let (w1, w2) = (log_uniform(rng, 0.2, 2.0), log_uniform(rng, 0.2, 2.0));
                let (q1, q2) = (self.sample_point(rng), self.sample_point(rng));
                let f = ConvexFunction::WeightedSum(vec![
                    (w1, ConvexFunction::HalfSquaredDistanceTo(q1)),
                    (w2, ConvexFunction::DistanceTo(q2)),
                ]);
                Instance { field: sub(f), zero: None }
            }
            Kind::LinearMap => self.sample_map(rng).expect("map kind offered only where supported"),
            set_kind => {
                let (set, member) = self.sample_set(set_kind, rng);
                Instance { field: sub(ConvexFunction::IndicatorOf(set)), zero: Some(member) }
            }
        }
    }
}

impl FieldSampler for Euclidean {
    const KINDS: &'static [Kind] = &[
        Kind::Distance,
        Kind::HalfSquared,
        Kind::Ball,
        Kind::Segment,
        Kind::Halfspace,
        Kind::Sum,
        Kind::LinearMap,
    ];

    fn sample_set(&self, kind: Kind, rng: &mut SampleRng) -> (ConvexSet<DVector<f64>>, DVector<f64>) {
        match kind {
            Kind::Ball => {
                let c = self.sample_point(rng);
                (ConvexSet::Ball { center: c.clone(), radius: rng.random_range(0.5..2.0) }, c)
            }
            Kind::Segment => {
                let (a, b) = (self.sample_point(rng), self.sample_point(rng));
                (ConvexSet::Segment(a.clone(), b), a)
            }
            _ => {
                let normal = self.sample_point(rng);
                let offset: f64 = rng.sample(StandardNormal);
                let member = &normal * (offset / normal.norm_squared()) - &normal;
                (ConvexSet::Halfspace { normal, offset }, member)
            }
        }
    }

    fn sample_map(&self, rng: &mut SampleRng) -> Option<Instance<DVector<f64>>> {
        let n = self.dim();
        let m = monotone_matrix(rng, n);
        let b = self.sample_point(rng);
        let zero = m.clone().lu().solve(&(-&b));
        let map = EuclideanMap::affine(m, b).expect("sampled matrix is monotone");
        Some(Instance { field: VectorField::EuclideanMap(map), zero })
    }
}

impl FieldSampler for HalfPlane {
    const KINDS: &'static [Kind] = &[Kind::Distance, Kind::HalfSquared, Kind::Ball, Kind::Segment, Kind::Sum];

    fn sample_set(&self, kind: Kind, rng: &mut SampleRng) -> (ConvexSet<Self::Point>, Self::Point) {
        let c = self.sample_point(rng);
        match kind {
            Kind::Ball => (ConvexSet::Ball { center: c.clone(), radius: rng.random_range(0.3..1.5) }, c),
            _ => (ConvexSet::Segment(c.clone(), self.sample_point(rng)), c),
        }
    }
}

impl FieldSampler for MetricTree {
    const KINDS: &'static [Kind] = &[Kind::Distance, Kind::HalfSquared, Kind::Subtree, Kind::Segment, Kind::Sum];

    fn sample_set(&self, kind: Kind, rng: &mut SampleRng) -> (ConvexSet<Self::Point>, Self::Point) {
        match kind {
            Kind::Subtree => {
                // Grow a connected vertex set from a random root.
                let root = rng.random_range(0..self.vertex_count());
                let mut members = vec![root];
                for _ in 0..rng.random_range(0..4) {
                    let frontier: Vec<usize> = self
                        .edges()
                        .iter()
                        .filter_map(|e| match (members.contains(&e.from), members.contains(&e.to)) {
                            (true, false) => Some(e.to),
                            (false, true) => Some(e.from),
                            _ => None,
                        })
                        .collect();
                    match frontier.choose(rng) {
                        Some(&v) => members.push(v),
                        None => break,
                    }
                }
                let vertices = members.iter().map(|&v| self.label(v).to_string()).collect();
                (ConvexSet::Subtree { vertices }, crate::spaces::TreePoint::Vertex(root))
            }
            _ => {
                let a = self.sample_point(rng);
                (ConvexSet::Segment(a, self.sample_point(rng)), a)
            }
        }
    }
}

pub(super) fn jobs(samples: usize) -> Vec<JobSpec> {
    let mut jobs = Vec::new();
    for (i, &kind) in Euclidean::KINDS.iter().enumerate() {
        jobs.push(JobSpec {
            stream: 300 + i as u64,
            run: Box::new(move |mut rng| check_kind(&Euclidean::new(3), kind, samples, &mut rng)),
        });
    }
    for (i, &kind) in HalfPlane::KINDS.iter().enumerate() {
        jobs.push(JobSpec {
            stream: 320 + i as u64,
            run: Box::new(move |mut rng| check_kind(&HalfPlane, kind, samples, &mut rng)),
        });
    }
    for (i, &kind) in MetricTree::KINDS.iter().enumerate() {
        jobs.push(JobSpec {
            stream: 340 + i as u64,
            run: Box::new(move |mut rng| {
                let tree = random_tree(&mut rng, 15);
                check_kind(&tree, kind, samples, &mut rng)
            }),
        });
    }
    jobs
}

fn lambda(rng: &mut SampleRng) -> f64 {
    log_uniform(rng, 0.1, 10.0)
}

fn check_kind<S: FieldSampler>(space: &S, kind: Kind, samples: usize, rng: &mut SampleRng) -> Vec<PropertyResult> {
    let tol = space.tolerance();
    let mut identity = Tally::below("resolvent_identity", EPS_IDENTITY);
    let mut nonspread = Tally::at_most("firm_nonspreading", GAP_TOL);
    let mut nonexpansive = Tally::at_most("firm_nonexpansive", GAP_TOL);
    let mut comparison = Tally::at_most("resolvent_comparison", GAP_TOL);
    let mut ratio = Tally::at_most("local_residual_ratio", tol);
    let mut monotone = Tally::at_most("monotonicity_selection", GAP_TOL);
    let mut graph = Tally::at_most("monotonicity_graph", GAP_TOL);
    let mut fixes_zero = Tally::at_most("fixes_zeros", EPS_PROX);
    let mut optimal = Tally::at_most("prox_optimality", EPS_PROX);
    let mut unique = Tally::at_most("solver_start_independence", 2.0 * EPS_PROX);
    let mut convex = Tally::at_most("function_convexity", tol);
    let mut oracle = Tally::below("linear_resolvent_oracle", ORACLE_TOL);

    for _ in 0..samples {
        let inst = space.sample_instance(kind, rng);
        let a = &inst.field;
        let [x, y] = [(); 2].map(|_| space.sample_point(rng));
        let (l, m) = (lambda(rng), lambda(rng));
        let mu = l * rng.random_range(0.01..=1.0);
        let alpha: f64 = rng.random();

        identity.record_result(resolvent_identity_residual(space, a, l, mu, &x));
        nonspread.record_result(firm_nonspread_gap(space, a, l, &x, &y).map(|g| -g));
        nonexpansive.record_result(firm_nonexpansive_slack(space, a, l, alpha, &x, &y).map(|g| -g));
        comparison.record_result(resolvent_comparison_gap(space, a, l, m, &x, &y).map(|g| -g));
        ratio.record_result(local_residual_ratio(space, a, l, m, &x).map(|(r1, r2)| r1 - r2));
        graph.record_result((|| {
            let (_, u) = resolvent_pair(space, a, l, &x)?;
            let (_, v) = resolvent_pair(space, a, m, &y)?;
            graph_monotonicity_gap(space, &u, &v)
        })());
        monotone.record_result(selection_gap(space, a, &x, &y));
        if let Some(z) = &inst.zero {
            fixes_zero.record_result(resolvent(space, a, l, z).map(|j| space.distance(&j, z)));
        }
        if let VectorField::Subdifferential(f) = a {
            optimal.record_result(optimality(space, f, l, &x, rng));
            convex.record_result((|| {
                let mid = convex_combination(space, &x, &y, alpha)?;
                let (fx, fy, fm) = (f.evaluate(space, &x)?, f.evaluate(space, &y)?, f.evaluate(space, &mid)?);
                if fx.is_infinite() || fy.is_infinite() {
                    return Ok(0.0);
                }
                Ok(fm - (1.0 - alpha) * fx - alpha * fy)
            })());
            if kind == Kind::Sum {
                unique.record_result((|| {
                    let p = prox(space, f, l, &x)?;
                    let other = prox_from(space, f, l, &x, &y)?;
                    Ok(space.distance(&p, &other))
                })());
            }
        }
        if let VectorField::EuclideanMap(EuclideanMap::Affine { matrix, offset }) = a {
            oracle.record_result((|| {
                let coords = space.coordinates(&x).expect("euclidean");
                let n = coords.len();
                let system = nalgebra::DMatrix::identity(n, n) + matrix * l;
                let inv = system.try_inverse().expect("I + λM is invertible for monotone M");
                let expected = inv * (&coords - offset * l);
                let got = space.coordinates(&resolvent(space, a, l, &x)?).expect("euclidean");
                Ok((got - expected).norm())
            })());
        }
    }

    let mut out = vec![identity, nonspread, nonexpansive, comparison, ratio, monotone, graph, fixes_zero];
    if kind != Kind::LinearMap {
        out.extend([optimal, convex]);
    }
    if kind == Kind::Sum {
        out.push(unique);
    }
    if kind == Kind::LinearMap {
        out.push(oracle);
    }
    let space_name = space.name();
    out.into_iter()
        .map(|t| {
            let mut r = t.finish(SuiteName::Resolvent, space_name);
            r.property = format!("{}/{}", r.property, kind.name());
            r
        })
        .collect()
}

/// Monotonicity of the stored selection at two points of the domain; for
/// indicators both points are first projected into the set.
fn selection_gap<S: HadamardSpace + ?Sized>(
    space: &S,
    a: &VectorField<S::Point>,
    x: &S::Point,
    y: &S::Point,
) -> Result<f64> {
    if let VectorField::Subdifferential(ConvexFunction::IndicatorOf(set)) = a {
        let (px, py) = (space.project(set, x)?, space.project(set, y)?);
        return monotonicity_gap(space, a, &px, &py);
    }
    monotonicity_gap(space, a, x, y).map_err(|e| match e {
        crate::error::Error::Domain(m) => crate::error::Error::NotInDomain(m),
        other => other,
    })
}

/// `-(min over candidates of M(y) − M(prox))`: positive when a random or
/// perturbed candidate beats the computed prox point.
fn optimality<S: PointSampler>(
    space: &S,
    f: &ConvexFunction<S::Point>,
    lambda: f64,
    x: &S::Point,
    rng: &mut SampleRng,
) -> Result<f64> {
    let p = prox(space, f, lambda, x)?;
    let mut candidates: Vec<S::Point> = (0..RANDOM_CANDIDATES).map(|_| space.sample_point(rng)).collect();
    for _ in 0..PERTURBATIONS {
        let dir = space.sample_point(rng);
        let d = space.distance(&p, &dir);
        let t = log_uniform(rng, 1e-6, 1e-1).min(d);
        candidates.push(space.geodesic_point(&p, &dir, t));
    }
    if let ConvexFunction::IndicatorOf(set) = f {
        // Membership is tested with the metric tolerance, so unprojected
        // candidates slightly outside the set could beat the exact answer.
        candidates = candidates.iter().map(|c| space.project(set, c)).collect::<Result<_>>()?;
    }
    let gap = prox_optimality_gap(space, f, lambda, x, &p, &candidates)?;
    let scale = 1.0 + moreau_objective(space, f, lambda, x, &p)?.abs();
    Ok(-gap / scale)
}
