//! Proximal point, Mann and Halpern iterations with schedule checks and
//! trace diagnostics.

mod diagnostics;
mod run;
mod schedule;
mod trace;

pub use diagnostics::{
    cesaro_objective, linear_growth, window_asymptotic_center, window_growth_rates, GrowthReport,
};
pub use run::{
    halpern_regime, run_algorithm, run_halpern, run_mann, run_ppa, GrowthCheck, RunConfig,
    RunFailure, RunResult,
};
pub use schedule::{
    check_schedule, AlphaRule, Hypothesis, HypothesisCheck, LambdaRule, Regime, ScheduleReport,
    ScheduleSpec, SeriesTrend, Verdict,
};
pub use trace::{Algorithm, IterationTrace, StopReason, TraceStep, TraceSummary, CSV_HEADER};
