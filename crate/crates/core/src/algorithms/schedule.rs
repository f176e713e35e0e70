//! Step-size and averaging schedules, and finite-horizon hypothesis checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The proximal parameters `λ_n`, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaRule {
    Constant { value: f64 },
    /// `scale / n`
    Harmonic { scale: f64 },
    /// `scale · n`
    Linear { scale: f64 },
    /// `scale · n^exponent`
    Power { scale: f64, exponent: f64 },
    /// Listed values; the last one is held beyond the end of the list.
    Explicit { values: Vec<f64> },
}

/// The averaging weights `α_n`, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaRule {
    Zero,
    Constant { value: f64 },
    /// `1 / (n + 1)`
    HarmonicShifted,
    /// Listed values; the last one is held beyond the end of the list.
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub lambda: LambdaRule,
    #[serde(default = "default_alpha")]
    pub alpha: AlphaRule,
}

fn default_alpha() -> AlphaRule {
    AlphaRule::Zero
}

fn held(values: &[f64], n: usize) -> f64 {
    values[(n - 1).min(values.len() - 1)]
}

impl LambdaRule {
    pub fn value(&self, n: usize) -> f64 {
        let k = n.max(1) as f64;
        match self {
            LambdaRule::Constant { value } => *value,
            LambdaRule::Harmonic { scale } => scale / k,
            LambdaRule::Linear { scale } => scale * k,
            LambdaRule::Power { scale, exponent } => scale * k.powf(*exponent),
            LambdaRule::Explicit { values } => held(values, n.max(1)),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &str, v: f64| {
            Error::config(format!("schedule.lambda.{field}"), format!("{v} is not a positive finite number"))
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self {
            LambdaRule::Constant { value } if !positive(*value) => Err(bad("value", *value)),
            LambdaRule::Harmonic { scale } | LambdaRule::Linear { scale } if !positive(*scale) => {
                Err(bad("scale", *scale))
            }
            LambdaRule::Power { scale, exponent } => {
                if !positive(*scale) {
                    Err(bad("scale", *scale))
                } else if !exponent.is_finite() {
                    Err(Error::config("schedule.lambda.exponent", "must be finite"))
                } else {
                    Ok(())
                }
            }
            LambdaRule::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::config("schedule.lambda.values", "list is empty"));
                }
                match values.iter().position(|v| !positive(*v)) {
                    Some(i) => Err(bad(&format!("values[{i}]"), values[i])),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

impl AlphaRule {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            AlphaRule::Zero => 0.0,
            AlphaRule::Constant { value } => *value,
            AlphaRule::HarmonicShifted => 1.0 / (n.max(1) as f64 + 1.0),
            AlphaRule::Explicit { values } => held(values, n.max(1)),
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        match self {
            AlphaRule::Constant { value } if !unit(*value) => Err(Error::config(
                "schedule.alpha.value",
                format!("{value} is outside [0, 1]"),
            )),
            AlphaRule::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::config("schedule.alpha.values", "list is empty"));
                }
                match values.iter().position(|v| !unit(*v)) {
                    Some(i) => Err(Error::config(
                        format!("schedule.alpha.values[{i}]"),
                        format!("{} is outside [0, 1]", values[i]),
                    )),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }
}

impl ScheduleSpec {
    pub fn new(lambda: LambdaRule, alpha: AlphaRule) -> Self {
        Self { lambda, alpha }
    }

    pub fn validate(&self) -> Result<()> {
        self.lambda.validate()?;
        self.alpha.validate()
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda.value(n)
    }

    pub fn alpha(&self, n: usize) -> f64 {
        self.alpha.value(n)
    }

    /// `σ_n = λ_1 + … + λ_n` for `n = 1..=horizon`.
    pub fn partial_sums(&self, horizon: usize) -> Vec<f64> {
        (1..=horizon)
            .scan(0.0, |acc, n| {
                *acc += self.lambda(n);
                Some(*acc)
            })
            .collect()
    }
}

/// The hypothesis sets under which the iterations are known to behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Proximal point: boundedness of the iterates characterizes `Zer(A) ≠ ∅`.
    PpaBounded,
    /// Proximal point: Δ-convergence to a zero.
    PpaConvergence,
    /// Mann averaging: boundedness of the resolvent points.
    MannBounded,
    /// Mann averaging: Δ-convergence to a zero.
    MannConvergence,
    /// Halpern anchoring with `λ_n → ∞`.
    HalpernGrowingLambda,
    /// Halpern anchoring with `λ_n` bounded away from zero and `α_n > 0`.
    HalpernBoundedLambda,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::PpaBounded,
        Regime::PpaConvergence,
        Regime::MannBounded,
        Regime::MannConvergence,
        Regime::HalpernGrowingLambda,
        Regime::HalpernBoundedLambda,
    ];

    pub fn hypotheses(self) -> &'static [Hypothesis] {
        use Hypothesis::*;
        match self {
            Regime::PpaBounded => &[SumLambdaDiverges],
            Regime::PpaConvergence => &[SumLambdaSquaredDiverges],
            Regime::MannBounded => &[AlphaBelowOne, SumWeightedLambdaDiverges],
            Regime::MannConvergence => &[
                AlphaBelowOne,
                SumWeightedLambdaDiverges,
                SupAlphaBelowOne,
                InfLambdaPositive,
            ],
            Regime::HalpernGrowingLambda => &[LambdaToInfinity, AlphaToZero, SumAlphaDiverges],
            Regime::HalpernBoundedLambda => &[
                AlphaPositive,
                AlphaToZero,
                SumAlphaDiverges,
                InfLambdaPositive,
            ],
        }
    }
}

/// One hypothesis on `(λ_n, α_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    SumLambdaDiverges,
    SumLambdaSquaredDiverges,
    /// `α_n ∈ [0, 1)`
    AlphaBelowOne,
    /// `α_n ∈ (0, 1]`
    AlphaPositive,
    /// `Σ(1 − α_n)λ_n = ∞`
    SumWeightedLambdaDiverges,
    SupAlphaBelowOne,
    InfLambdaPositive,
    LambdaToInfinity,
    AlphaToZero,
    SumAlphaDiverges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Holds at the horizon (for limits and series, by trend).
    Satisfied,
    Violated,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub detail: String,
}

/// Partial sum of a nonnegative series and the decay exponent of its terms
/// near the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTrend {
    pub partial_sum: f64,
    /// Estimated `p` in `u_n ≈ C n^{−p}`; `None` when the horizon is too
    /// short or the tail vanishes.
    pub decay_exponent: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub regime: Regime,
    pub horizon: usize,
    pub sum_lambda: SeriesTrend,
    pub sum_lambda_squared: SeriesTrend,
    pub sum_alpha: SeriesTrend,
    pub sum_weighted_lambda: SeriesTrend,
    pub checks: Vec<HypothesisCheck>,
    pub verdict: Verdict,
}

const MIN_TREND_HORIZON: usize = 8;

/// Decay exponent `log₂(mean(u on (N/4, N/2]) / mean(u on (N/2, N]))`.
///
/// `Some(+∞)` for a vanishing tail, `Some(−∞)` for a tail appearing from zero.
fn decay_exponent(u: &[f64]) -> Option<f64> {
    let n = u.len();
    if n < MIN_TREND_HORIZON {
        return None;
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let early = mean(&u[n / 4..n / 2]);
    let late = mean(&u[n / 2..]);
    Some(match (early > 0.0, late > 0.0) {
        (_, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (true, true) => (early / late).log2(),
    })
}

/// Divergent trend when the terms decay no faster than `n^{-1.05}`,
/// convergent when they decay at least like `n^{-1.5}` (or vanish).
fn series_trend(u: &[f64]) -> SeriesTrend {
    let partial_sum = u.iter().sum();
    let p = decay_exponent(u);
    let verdict = match p {
        None => Verdict::Indeterminate,
        Some(p) if p <= 1.05 => Verdict::Satisfied,
        Some(p) if p >= 1.5 => Verdict::Violated,
        Some(_) => Verdict::Indeterminate,
    };
    SeriesTrend {
        partial_sum,
        decay_exponent: p.filter(|p| p.is_finite()),
        verdict,
    }
}

fn describe(p: Option<f64>) -> String {
    match p {
        None => "horizon too short for a trend".to_string(),
        Some(p) if p == f64::INFINITY => "tail vanishes".to_string(),
        Some(p) if p == f64::NEG_INFINITY => "tail appears from zero".to_string(),
        Some(p) => format!("decay exponent {p:.4}"),
    }
}

/// Evaluates every hypothesis of `regime` on the first `horizon` terms.
///
/// Range conditions are checked exactly. Limits and divergent series are
/// judged by the power-law trend of the terms near the horizon, so a
/// `Satisfied` verdict is evidence, not proof.
pub fn check_schedule(regime: Regime, schedule: &ScheduleSpec, horizon: usize) -> Result<ScheduleReport> {
    if horizon == 0 {
        return Err(Error::config("horizon", "must be at least 1"));
    }
    schedule.validate()?;
    let lambdas: Vec<f64> = (1..=horizon).map(|n| schedule.lambda(n)).collect();
    let alphas: Vec<f64> = (1..=horizon).map(|n| schedule.alpha(n)).collect();
    let squares: Vec<f64> = lambdas.iter().map(|l| l * l).collect();
    let weighted: Vec<f64> = lambdas.iter().zip(&alphas).map(|(l, a)| (1.0 - a) * l).collect();
    let gaps: Vec<f64> = alphas.iter().map(|a| 1.0 - a).collect();

    let sum_lambda = series_trend(&lambdas);
    let sum_lambda_squared = series_trend(&squares);
    let sum_alpha = series_trend(&alphas);
    let sum_weighted_lambda = series_trend(&weighted);

    let series_check = |h, t: &SeriesTrend| HypothesisCheck {
        hypothesis: h,
        verdict: t.verdict,
        detail: format!(
            "partial sum {:.6e} at horizon {horizon}; {}",
            t.partial_sum,
            describe(decay_exponent_raw(t, horizon))
        ),
    };
    let mut checks = Vec::new();
    for &h in regime.hypotheses() {
        let check = match h {
            Hypothesis::SumLambdaDiverges => series_check(h, &sum_lambda),
            Hypothesis::SumLambdaSquaredDiverges => series_check(h, &sum_lambda_squared),
            Hypothesis::SumWeightedLambdaDiverges => series_check(h, &sum_weighted_lambda),
            Hypothesis::SumAlphaDiverges => series_check(h, &sum_alpha),
            Hypothesis::AlphaBelowOne => range_check(h, &alphas, |a| a < 1.0, "α_n = 1"),
            Hypothesis::AlphaPositive => range_check(h, &alphas, |a| a > 0.0, "α_n = 0"),
            Hypothesis::SupAlphaBelowOne => {
                let sup = alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let p = decay_exponent(&gaps);
                let verdict = if sup >= 1.0 {
                    Verdict::Violated
                } else {
                    match p {
                        None => Verdict::Satisfied,
                        Some(p) if p >= 0.1 => Verdict::Violated,
                        Some(p) if p <= 0.02 => Verdict::Satisfied,
                        Some(_) => Verdict::Indeterminate,
                    }
                };
                HypothesisCheck {
                    hypothesis: h,
                    verdict,
                    detail: format!("max α_n = {sup:.6}; 1 − α_n has {}", describe(p)),
                }
            }
            Hypothesis::InfLambdaPositive => {
                let inf = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
                let p = decay_exponent(&lambdas);
                let verdict = match p {
                    None => Verdict::Satisfied,
                    Some(p) if p <= 0.02 => Verdict::Satisfied,
                    Some(p) if p >= 0.1 => Verdict::Violated,
                    Some(_) => Verdict::Indeterminate,
                };
                HypothesisCheck {
                    hypothesis: h,
                    verdict,
                    detail: format!("min λ_n = {inf:.6e}; λ_n has {}", describe(p)),
                }
            }
            Hypothesis::LambdaToInfinity => {
                let p = decay_exponent(&lambdas);
                let verdict = match p {
                    None => Verdict::Indeterminate,
                    Some(p) if p <= -0.1 => Verdict::Satisfied,
                    Some(p) if p >= -0.02 => Verdict::Violated,
                    Some(_) => Verdict::Indeterminate,
                };
                HypothesisCheck {
                    hypothesis: h,
                    verdict,
                    detail: format!("λ_n has {}", describe(p)),
                }
            }
            Hypothesis::AlphaToZero => {
                let p = decay_exponent(&alphas);
                let verdict = match p {
                    None => Verdict::Indeterminate,
                    Some(p) if p >= 0.1 => Verdict::Satisfied,
                    Some(p) if p <= 0.02 => Verdict::Violated,
                    Some(_) => Verdict::Indeterminate,
                };
                HypothesisCheck {
                    hypothesis: h,
                    verdict,
                    detail: format!("α_n has {}", describe(p)),
                }
            }
        };
        checks.push(check);
    }
    let verdict = if checks.iter().any(|c| c.verdict == Verdict::Violated) {
        Verdict::Violated
    } else if checks.iter().any(|c| c.verdict == Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::Satisfied
    };
    Ok(ScheduleReport {
        regime,
        horizon,
        sum_lambda,
        sum_lambda_squared,
        sum_alpha,
        sum_weighted_lambda,
        checks,
        verdict,
    })
}

fn decay_exponent_raw(t: &SeriesTrend, horizon: usize) -> Option<f64> {
    match (t.decay_exponent, horizon >= MIN_TREND_HORIZON) {
        (Some(p), _) => Some(p),
        (None, false) => None,
        (None, true) if t.verdict == Verdict::Violated => Some(f64::INFINITY),
        (None, true) => Some(f64::NEG_INFINITY),
    }
}

fn range_check(h: Hypothesis, alphas: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> HypothesisCheck {
    match alphas.iter().position(|&a| !ok(a)) {
        Some(i) => HypothesisCheck {
            hypothesis: h,
            verdict: Verdict::Violated,
            detail: format!("{what} at n = {}", i + 1),
        },
        None => HypothesisCheck {
            hypothesis: h,
            verdict: Verdict::Satisfied,
            detail: "holds for every n up to the horizon".to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(lambda: LambdaRule, alpha: AlphaRule) -> ScheduleSpec {
        ScheduleSpec::new(lambda, alpha)
    }

    fn check_of(r: &ScheduleReport, h: Hypothesis) -> Verdict {
        r.checks.iter().find(|c| c.hypothesis == h).unwrap().verdict
    }

    #[test]
    fn rule_values() {
        assert_eq!(LambdaRule::Harmonic { scale: 2.0 }.value(4), 0.5);
        assert_eq!(LambdaRule::Linear { scale: 2.0 }.value(4), 8.0);
        assert_eq!(LambdaRule::Power { scale: 1.0, exponent: -2.0 }.value(4), 1.0 / 16.0);
        let e = LambdaRule::Explicit { values: vec![1.0, 3.0] };
        assert_eq!((e.value(1), e.value(2), e.value(9)), (1.0, 3.0, 3.0));
        assert_eq!(AlphaRule::HarmonicShifted.value(1), 0.5);
        assert_eq!(AlphaRule::Zero.value(7), 0.0);
    }

    #[test]
    fn partial_sums_accumulate() {
        let s = sched(LambdaRule::Linear { scale: 1.0 }, AlphaRule::Zero);
        assert_eq!(s.partial_sums(4), vec![1.0, 3.0, 6.0, 10.0]);
    }

    #[test]
    fn invalid_rules_name_their_field() {
        let s = sched(LambdaRule::Constant { value: 0.0 }, AlphaRule::Zero);
        assert!(matches!(s.validate(), Err(Error::Config { field, .. }) if field == "schedule.lambda.value"));
        let s = sched(
            LambdaRule::Constant { value: 1.0 },
            AlphaRule::Explicit { values: vec![0.5, 1.5] },
        );
        assert!(matches!(s.validate(), Err(Error::Config { field, .. }) if field == "schedule.alpha.values[1]"));
    }

    #[test]
    fn constant_lambda_series_diverge() {
        let s = sched(LambdaRule::Constant { value: 1.0 }, AlphaRule::Zero);
        let r = check_schedule(Regime::PpaConvergence, &s, 1000).unwrap();
        assert_eq!(r.sum_lambda.verdict, Verdict::Satisfied);
        assert_eq!(r.sum_lambda_squared.verdict, Verdict::Satisfied);
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn inverse_square_lambda_violates_square_summability() {
        let s = sched(LambdaRule::Power { scale: 1.0, exponent: -2.0 }, AlphaRule::Zero);
        for horizon in [1000, 10_000] {
            let r = check_schedule(Regime::PpaConvergence, &s, horizon).unwrap();
            assert_eq!(check_of(&r, Hypothesis::SumLambdaSquaredDiverges), Verdict::Violated);
            assert_eq!(r.sum_lambda.verdict, Verdict::Violated);
        }
    }

    #[test]
    fn harmonic_lambda_is_borderline_divergent() {
        let s = sched(LambdaRule::Harmonic { scale: 1.0 }, AlphaRule::Zero);
        let r = check_schedule(Regime::PpaBounded, &s, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied);
        let r = check_schedule(Regime::PpaConvergence, &s, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn harmonic_alpha_halpern_regimes() {
        let s = sched(LambdaRule::Linear { scale: 1.0 }, AlphaRule::HarmonicShifted);
        for horizon in [1000, 10_000] {
            let r = check_schedule(Regime::HalpernGrowingLambda, &s, horizon).unwrap();
            assert_eq!(check_of(&r, Hypothesis::AlphaToZero), Verdict::Satisfied);
            assert_eq!(check_of(&r, Hypothesis::SumAlphaDiverges), Verdict::Satisfied);
            assert_eq!(r.verdict, Verdict::Satisfied);
        }
        let s = sched(LambdaRule::Constant { value: 1.0 }, AlphaRule::HarmonicShifted);
        let r = check_schedule(Regime::HalpernGrowingLambda, &s, 1000).unwrap();
        assert_eq!(check_of(&r, Hypothesis::LambdaToInfinity), Verdict::Violated);
        let r = check_schedule(Regime::HalpernBoundedLambda, &s, 1000).unwrap();
        assert_eq!(r.verdict, Verdict::Satisfied);
    }

    #[test]
    fn mann_hypotheses() {
        let s = sched(LambdaRule::Constant { value: 1.0 }, AlphaRule::Constant { value: 0.5 });
        assert_eq!(check_schedule(Regime::MannConvergence, &s, 500).unwrap().verdict, Verdict::Satisfied);
        let s = sched(LambdaRule::Constant { value: 1.0 }, AlphaRule::Constant { value: 1.0 });
        let r = check_schedule(Regime::MannBounded, &s, 500).unwrap();
        assert_eq!(check_of(&r, Hypothesis::AlphaBelowOne), Verdict::Violated);
        assert_eq!(check_of(&r, Hypothesis::SumWeightedLambdaDiverges), Verdict::Violated);
        // α_n → 1 keeps every term below one but the supremum is one.
        let alphas = (1..=1000).map(|n| 1.0 - 1.0 / (n as f64 + 1.0)).collect();
        let s = sched(LambdaRule::Linear { scale: 1.0 }, AlphaRule::Explicit { values: alphas });
        let r = check_schedule(Regime::MannConvergence, &s, 1000).unwrap();
        assert_eq!(check_of(&r, Hypothesis::SupAlphaBelowOne), Verdict::Violated);
        assert_eq!(check_of(&r, Hypothesis::AlphaBelowOne), Verdict::Satisfied);
    }

    #[test]
    fn short_horizons_are_indeterminate() {
        let s = sched(LambdaRule::Constant { value: 1.0 }, AlphaRule::Zero);
        let r = check_schedule(Regime::PpaBounded, &s, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Indeterminate);
        assert!(check_schedule(Regime::PpaBounded, &s, 0).is_err());
    }

    #[test]
    fn zero_alpha_tail_is_summable() {
        let s = sched(LambdaRule::Constant { value: 1.0 }, AlphaRule::Zero);
        let r = check_schedule(Regime::HalpernBoundedLambda, &s, 100).unwrap();
        assert_eq!(check_of(&r, Hypothesis::AlphaPositive), Verdict::Violated);
        assert_eq!(check_of(&r, Hypothesis::SumAlphaDiverges), Verdict::Violated);
        assert_eq!(check_of(&r, Hypothesis::AlphaToZero), Verdict::Satisfied);
    }
}
