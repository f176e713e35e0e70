//! Randomized batteries checking the inequalities every model space and
//! resolvent must satisfy.

mod algorithms;
mod geometry;
mod resolvent;
mod tangent;

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampleRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Geometry,
    Tangent,
    Resolvent,
    Algorithms,
    All,
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" => Ok(SuiteName::Geometry),
            "tangent" => Ok(SuiteName::Tangent),
            "resolvent" => Ok(SuiteName::Resolvent),
            "algorithms" => Ok(SuiteName::Algorithms),
            "all" => Ok(SuiteName::All),
            other => Err(Error::config(
                "suite",
                format!("unknown suite `{other}`; expected geometry, tangent, resolvent, algorithms or all"),
            )),
        }
    }
}

/// How the observed violation is compared with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `violation ≤ tolerance`
    AtMost,
    /// `violation < tolerance`
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub suite: SuiteName,
    pub property: String,
    pub space: String,
    pub samples: usize,
    /// Samples outside the property's domain (for example a point with an
    /// empty subdifferential).
    pub skipped: usize,
    /// Largest violation seen, clamped to the finite range (JSON has no
    /// infinities); `None` when nothing was evaluated.
    pub max_violation: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub samples: usize,
    pub seed: u64,
    pub warnings: Vec<String>,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.passed)
    }

    pub fn find(&self, property: &str, space: &str) -> Option<&PropertyResult> {
        self.properties
            .iter()
            .find(|p| p.property == property && p.space == space)
    }
}

/// Accumulates per-sample violations of one property.
pub(crate) struct Tally {
    name: String,
    tolerance: f64,
    bound: Bound,
    worst: Option<f64>,
    evaluated: usize,
    skipped: usize,
    note: Option<String>,
}

impl Tally {
    pub(crate) fn new(name: impl Into<String>, tolerance: f64, bound: Bound) -> Self {
        Self {
            name: name.into(),
            tolerance,
            bound,
            worst: None,
            evaluated: 0,
            skipped: 0,
            note: None,
        }
    }

    pub(crate) fn at_most(name: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, tolerance, Bound::AtMost)
    }

    pub(crate) fn below(name: impl Into<String>, tolerance: f64) -> Self {
        Self::new(name, tolerance, Bound::Below)
    }

    pub(crate) fn record(&mut self, violation: f64) {
        self.evaluated += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        self.worst = Some(self.worst.map_or(v, |w| w.max(v)));
    }

    /// Records `Ok` values; skips samples outside the domain and counts any
    /// other error as an infinite violation.
    pub(crate) fn record_result(&mut self, r: Result<f64>) {
        match r {
            Ok(v) => self.record(v),
            Err(Error::NotInDomain(_)) | Err(Error::Unsupported(_)) => self.skipped += 1,
            Err(e) => {
                self.note.get_or_insert_with(|| e.to_string());
                self.record(f64::INFINITY);
            }
        }
    }

    pub(crate) fn finish(self, suite: SuiteName, space: &str) -> PropertyResult {
        let passed = match (self.worst, self.bound) {
            (None, _) => true,
            (Some(w), Bound::AtMost) => w <= self.tolerance,
            (Some(w), Bound::Below) => w < self.tolerance,
        };
        PropertyResult {
            suite,
            property: self.name,
            space: space.to_string(),
            samples: self.evaluated,
            skipped: self.skipped,
            max_violation: self.worst.map(|w| w.clamp(f64::MIN, f64::MAX)),
            tolerance: self.tolerance,
            bound: self.bound,
            passed,
            note: self.note,
        }
    }
}

type Job = Box<dyn FnOnce() -> Vec<PropertyResult> + Send>;

/// A unit of work with its own random stream.
pub(crate) struct JobSpec {
    pub(crate) stream: u64,
    pub(crate) run: Box<dyn FnOnce(SampleRng) -> Vec<PropertyResult> + Send>,
}

fn jobs_for(suite: SuiteName, samples: usize) -> Vec<JobSpec> {
    match suite {
        SuiteName::Geometry => geometry::jobs(samples),
        SuiteName::Tangent => tangent::jobs(samples),
        SuiteName::Resolvent => resolvent::jobs(samples),
        SuiteName::Algorithms => algorithms::jobs(samples),
        SuiteName::All => [
            SuiteName::Geometry,
            SuiteName::Tangent,
            SuiteName::Resolvent,
            SuiteName::Algorithms,
        ]
        .into_iter()
        .flat_map(|s| jobs_for(s, samples))
        .collect(),
    }
}

/// Runs every job, in parallel, returning results in job order.
fn execute(jobs: Vec<Job>) -> Vec<PropertyResult> {
    let n = jobs.len();
    let slots: Vec<Mutex<Option<Job>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Vec<PropertyResult>>> = (0..n).map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let job = slots[i].lock().expect("job slot").take().expect("job taken once");
                *results[i].lock().expect("result slot") = job();
            });
        }
    });
    results
        .into_iter()
        .flat_map(|m| m.into_inner().expect("result slot"))
        .collect()
}

/// Runs the named battery with `samples` random instances per property and
/// model space. Reports are identical for identical arguments.
pub fn run_property_suite(name: &str, samples: usize, seed: u64) -> Result<SuiteReport> {
    let suite: SuiteName = name.parse()?;
    let mut warnings = Vec::new();
    if samples == 0 {
        warnings.push("samples = 0: every property passes vacuously".to_string());
    }
    let jobs: Vec<Job> = jobs_for(suite, samples)
        .into_iter()
        .map(|spec| {
            let rng = crate::sampling::substream(seed, spec.stream);
            let run = spec.run;
            Box::new(move || run(rng)) as Job
        })
        .collect();
    let properties = execute(jobs);
    let passed = properties.iter().all(|p| p.passed);
    Ok(SuiteReport {
        suite,
        samples,
        seed,
        warnings,
        properties,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_property_suite("bogus", 1, 0), Err(Error::Config { .. })));
    }

    #[test]
    fn zero_samples_pass_with_warning() {
        let r = run_property_suite("all", 0, 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.warnings.len(), 1);
        assert!(r.properties.iter().all(|p| p.max_violation.is_none()));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_property_suite("geometry", 50, 9).unwrap();
        let b = run_property_suite("geometry", 50, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn tally_semantics() {
        let mut t = Tally::below("x", 1.0);
        t.record(0.5);
        t.record_result(Err(Error::NotInDomain("leaf".into())));
        let r = t.finish(SuiteName::Geometry, "s");
        assert!(r.passed);
        assert_eq!((r.samples, r.skipped), (1, 1));
        let mut t = Tally::below("x", 1.0);
        t.record(1.0);
        assert!(!t.finish(SuiteName::Geometry, "s").passed);
        let mut t = Tally::at_most("x", 1.0);
        t.record(f64::NAN);
        assert!(!t.finish(SuiteName::Geometry, "s").passed);
    }
}
