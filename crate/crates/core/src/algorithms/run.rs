use std::fmt;

use super::diagnostics::window_growth_rates;
use super::schedule::{check_schedule, AlphaRule, Regime, ScheduleSpec, Verdict};
use super::trace::{Algorithm, IterationTrace, StopReason, TraceStep};
use crate::error::{Error, Result};
use crate::geometry::{convex_combination, HadamardSpace};
use crate::prox::{resolvent, VectorField};

/// Online detection of unbounded runs.
///
/// Every `window` steps, the growth rate of `ρ(x_n, x_1)` per unit of `σ_n`
/// over the last window is compared with the previous window. The run stops
/// with [`StopReason::LinearGrowth`] when the rate is at least `min_rate` and
/// has not slowed by more than 10%.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCheck {
    pub window: usize,
    pub min_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<P> {
    pub start: P,
    /// `v`; required by Halpern and rejected otherwise.
    pub anchor: Option<P>,
    pub max_iter: usize,
    pub residual_tol: f64,
    /// Defaults to the space's metric tolerance; `0` disables the rule.
    pub step_tol: Option<f64>,
    /// A known zero (PPA, Mann) or `P_{Zer(A)} v` (Halpern).
    pub reference: Option<P>,
    pub record_points: bool,
    pub divergence_radius: Option<f64>,
    pub growth_check: Option<GrowthCheck>,
}

impl<P> RunConfig<P> {
    pub fn new(start: P, max_iter: usize, residual_tol: f64) -> Self {
        Self {
            start,
            anchor: None,
            max_iter,
            residual_tol,
            step_tol: None,
            reference: None,
            record_points: true,
            divergence_radius: None,
            growth_check: None,
        }
    }

    pub fn with_anchor(mut self, anchor: P) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn with_reference(mut self, reference: P) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_step_tol(mut self, tol: f64) -> Self {
        self.step_tol = Some(tol);
        self
    }
}

/// A run that stopped on an error, with the steps completed before it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure<P> {
    pub error: Error,
    pub partial: Option<IterationTrace<P>>,
}

impl<P> fmt::Display for RunFailure<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.partial {
            Some(t) => write!(f, "{} (after {} steps)", self.error, t.len()),
            None => write!(f, "{}", self.error),
        }
    }
}

impl<P: fmt::Debug> std::error::Error for RunFailure<P> {}

impl<P> From<RunFailure<P>> for Error {
    fn from(f: RunFailure<P>) -> Self {
        f.error
    }
}

impl<P> From<Error> for RunFailure<P> {
    fn from(error: Error) -> Self {
        RunFailure { error, partial: None }
    }
}

pub type RunResult<P> = std::result::Result<IterationTrace<P>, RunFailure<P>>;

/// `x_{n+1} = J_{λ_n} x_n`.
pub fn run_ppa<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    schedule: &ScheduleSpec,
    config: &RunConfig<S::Point>,
) -> RunResult<S::Point> {
    if schedule.alpha != AlphaRule::Zero {
        return Err(Error::config("schedule.alpha", "the proximal point iteration takes no averaging weights").into());
    }
    iterate(space, field, schedule, config, Algorithm::Ppa, None)
}

/// `x_{n+1} = α_n x_n ⊕ (1 − α_n) J_{λ_n} x_n` with `α_n ∈ [0, 1)`.
pub fn run_mann<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    schedule: &ScheduleSpec,
    config: &RunConfig<S::Point>,
) -> RunResult<S::Point> {
    iterate(space, field, schedule, config, Algorithm::Mann, None)
}

/// `x_{n+1} = α_n v ⊕ (1 − α_n) J_{λ_n} x_n`.
///
/// The schedule is matched at horizon `max_iter` against the growing-λ
/// regime first and the bounded-λ regime second; a schedule violating both
/// is rejected.
pub fn run_halpern<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    schedule: &ScheduleSpec,
    config: &RunConfig<S::Point>,
) -> RunResult<S::Point> {
    let regime = halpern_regime(schedule, config.max_iter)?;
    iterate(space, field, schedule, config, Algorithm::Halpern, Some(regime))
}

pub fn run_algorithm<S: HadamardSpace + ?Sized>(
    algorithm: Algorithm,
    space: &S,
    field: &VectorField<S::Point>,
    schedule: &ScheduleSpec,
    config: &RunConfig<S::Point>,
) -> RunResult<S::Point> {
    match algorithm {
        Algorithm::Ppa => run_ppa(space, field, schedule, config),
        Algorithm::Mann => run_mann(space, field, schedule, config),
        Algorithm::Halpern => run_halpern(space, field, schedule, config),
    }
}

/// The Halpern regime a schedule is run under.
pub fn halpern_regime(schedule: &ScheduleSpec, horizon: usize) -> Result<Regime> {
    let horizon = horizon.max(1);
    let mut best = None;
    for regime in [Regime::HalpernGrowingLambda, Regime::HalpernBoundedLambda] {
        let report = check_schedule(regime, schedule, horizon)?;
        match report.verdict {
            Verdict::Satisfied => return Ok(regime),
            Verdict::Indeterminate => {
                best.get_or_insert(regime);
            }
            Verdict::Violated => {}
        }
    }
    best.ok_or_else(|| {
        Error::config(
            "schedule",
            "violates both Halpern regimes (λ_n → ∞, or inf λ_n > 0 with α_n ∈ (0, 1]; both need α_n → 0 and Σα_n = ∞)",
        )
    })
}

fn validate_config<S: HadamardSpace + ?Sized>(
    space: &S,
    config: &RunConfig<S::Point>,
    algorithm: Algorithm,
) -> Result<()> {
    if config.max_iter == 0 {
        return Err(Error::config("algorithm.max_iter", "must be positive"));
    }
    if !(config.residual_tol.is_finite() && config.residual_tol > 0.0) {
        return Err(Error::config("algorithm.residual_tol", "must be a positive number"));
    }
    if let Some(t) = config.step_tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::config("algorithm.step_tol", "must be a nonnegative number"));
        }
    }
    let start = space.validate(&config.start);
    start.map_err(|e| Error::config("algorithm.start", e.to_string()))?;
    match (&config.anchor, algorithm) {
        (Some(v), Algorithm::Halpern) => space
            .validate(v)
            .map_err(|e| Error::config("algorithm.anchor", e.to_string()))?,
        (None, Algorithm::Halpern) => {
            return Err(Error::config("algorithm.anchor", "Halpern iteration needs an anchor"))
        }
        (Some(_), _) => {
            return Err(Error::config("algorithm.anchor", format!("{algorithm} iteration takes no anchor")))
        }
        (None, _) => {}
    }
    if let Some(r) = &config.reference {
        space
            .validate(r)
            .map_err(|e| Error::config("problem.reference", e.to_string()))?;
    }
    Ok(())
}

fn iterate<S: HadamardSpace + ?Sized>(
    space: &S,
    field: &VectorField<S::Point>,
    schedule: &ScheduleSpec,
    config: &RunConfig<S::Point>,
    algorithm: Algorithm,
    regime: Option<Regime>,
) -> RunResult<S::Point> {
    schedule.validate()?;
    validate_config(space, config, algorithm)?;
    field.validate(space)?;
    let step_tol = config.step_tol.unwrap_or_else(|| space.tolerance());
    let dist_ref = |p: &S::Point| config.reference.as_ref().map(|r| space.distance(p, r));

    let mut trace = IterationTrace {
        algorithm,
        regime,
        steps: Vec::new(),
        iterates: Vec::new(),
        resolvents: Vec::new(),
        stop: StopReason::MaxIter,
        last: config.start.clone(),
        final_dist_ref: dist_ref(&config.start),
    };
    let mut x = config.start.clone();
    let mut sigma = 0.0;
    for n in 1..=config.max_iter {
        let lambda = schedule.lambda(n);
        let alpha = schedule.alpha(n);
        if algorithm == Algorithm::Mann && alpha >= 1.0 {
            let error = Error::config("schedule.alpha", format!("Mann iteration needs α_n < 1, got α_{n} = {alpha}"));
            return Err(RunFailure { error, partial: Some(trace) });
        }
        let y = match resolvent(space, field, lambda, &x) {
            Ok(y) => y,
            Err(error) => return Err(RunFailure { error, partial: Some(trace) }),
        };
        let next = match algorithm {
            Algorithm::Ppa => Ok(y.clone()),
            Algorithm::Mann => convex_combination(space, &y, &x, alpha),
            Algorithm::Halpern => {
                let v = config.anchor.as_ref().expect("anchor checked");
                convex_combination(space, &y, v, alpha)
            }
        };
        let next = match next {
            Ok(p) => p,
            Err(error) => return Err(RunFailure { error, partial: Some(trace) }),
        };
        sigma += lambda;
        let residual = space.distance(&y, &x) / lambda;
        let step = space.distance(&next, &x);
        trace.steps.push(TraceStep {
            n,
            lambda,
            alpha,
            residual,
            step,
            dist_ref: dist_ref(&x),
            dist_start: space.distance(&x, &config.start),
            sigma,
        });
        if config.record_points {
            trace.iterates.push(x);
            trace.resolvents.push(y);
        }
        x = next;

        // An anchored step can move off a zero of the field, so Halpern
        // also needs the step itself to settle.
        let settled = residual < config.residual_tol
            && (algorithm != Algorithm::Halpern || step < config.residual_tol);
        let stop = if settled {
            Some(StopReason::Residual)
        } else if step < step_tol {
            Some(StopReason::Step)
        } else if config
            .divergence_radius
            .is_some_and(|r| space.distance(&x, &config.start) > r)
        {
            Some(StopReason::Diverged)
        } else if config.growth_check.is_some_and(|g| growing(&trace.steps, g)) {
            Some(StopReason::LinearGrowth)
        } else {
            None
        };
        if let Some(reason) = stop {
            trace.stop = reason;
            break;
        }
    }
    trace.final_dist_ref = dist_ref(&x);
    trace.last = x;
    Ok(trace)
}

fn growing(steps: &[TraceStep], check: GrowthCheck) -> bool {
    let w = check.window;
    if w == 0 || steps.len() % w != 0 {
        return false;
    }
    match window_growth_rates(steps, w) {
        Some((previous, recent)) => recent >= check.min_rate && recent >= 0.9 * previous,
        None => false,
    }
}
