use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::schedule::Regime;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// `x_{n+1} = J_{λ_n} x_n`
    Ppa,
    /// `x_{n+1} = α_n x_n ⊕ (1 − α_n) J_{λ_n} x_n`
    Mann,
    /// `x_{n+1} = α_n v ⊕ (1 − α_n) J_{λ_n} x_n`
    Halpern,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ppa => "ppa",
            Algorithm::Mann => "mann",
            Algorithm::Halpern => "halpern",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `r_n` fell below the residual tolerance.
    Residual,
    /// `ρ(x_{n+1}, x_n)` fell below the step tolerance.
    Step,
    MaxIter,
    /// `ρ(x_{n+1}, x_1)` exceeded the divergence radius.
    Diverged,
    /// Distance from the start kept growing linearly in `σ_n`.
    LinearGrowth,
}

/// One row of a trace: the state at iterate `x_n` and the move to `x_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    /// `(1/λ_n) ρ(J_{λ_n} x_n, x_n)`
    pub residual: f64,
    /// `ρ(x_{n+1}, x_n)`
    pub step: f64,
    /// `ρ(x_n, reference)`
    pub dist_ref: Option<f64>,
    /// `ρ(x_n, x_1)`
    pub dist_start: f64,
    /// `σ_n = λ_1 + … + λ_n`
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<P> {
    pub algorithm: Algorithm,
    /// Hypothesis set the schedule was matched against (Halpern only).
    pub regime: Option<Regime>,
    pub steps: Vec<TraceStep>,
    /// `x_n` for each recorded step, when points are recorded.
    pub iterates: Vec<P>,
    /// `J_{λ_n} x_n` for each recorded step, when points are recorded.
    pub resolvents: Vec<P>,
    pub stop: StopReason,
    /// The last iterate produced, `x_{N+1}` after `N` steps.
    pub last: P,
    /// `ρ(x_{N+1}, reference)`
    pub final_dist_ref: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub algorithm: Algorithm,
    pub regime: Option<Regime>,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub final_dist_ref: Option<f64>,
}

pub const CSV_HEADER: &str = "n,lambda,alpha,residual,step,dist_ref";

impl<P> IterationTrace<P> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.steps.last().map(|s| s.residual)
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            algorithm: self.algorithm,
            regime: self.regime,
            stop_reason: self.stop,
            iterations: self.steps.len(),
            final_residual: self.final_residual(),
            final_dist_ref: self.final_dist_ref,
        }
    }

    /// Largest increase `ρ(x_{n+1}, z) − ρ(x_n, z)` of the reference distance;
    /// nonpositive for a Fejér monotone run.
    pub fn max_fejer_increase(&self) -> Option<f64> {
        let mut d: Vec<f64> = self.steps.iter().filter_map(|s| s.dist_ref).collect();
        d.extend(self.final_dist_ref);
        d.windows(2).map(|w| w[1] - w[0]).reduce(f64::max)
    }

    /// Largest increase `r_{n+1} − r_n` of the residual.
    pub fn max_residual_increase(&self) -> Option<f64> {
        self.steps
            .windows(2)
            .map(|w| w[1].residual - w[0].residual)
            .reduce(f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for s in &self.steps {
            let dist = s.dist_ref.map(|d| d.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.n, s.lambda, s.alpha, s.residual, s.step, dist
            )?;
        }
        out.flush().map_err(Error::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(n: usize, residual: f64, dist_ref: Option<f64>) -> TraceStep {
        TraceStep {
            n,
            lambda: 1.0,
            alpha: 0.0,
            residual,
            step: 0.5,
            dist_ref,
            dist_start: 0.0,
            sigma: n as f64,
        }
    }

    fn trace(steps: Vec<TraceStep>, final_dist_ref: Option<f64>) -> IterationTrace<f64> {
        IterationTrace {
            algorithm: Algorithm::Ppa,
            regime: None,
            steps,
            iterates: vec![],
            resolvents: vec![],
            stop: StopReason::MaxIter,
            last: 0.0,
            final_dist_ref,
        }
    }

    #[test]
    fn csv_layout() {
        let t = trace(vec![step(1, 0.5, Some(1.0)), step(2, 0.25, None)], None);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,lambda,alpha,residual,step,dist_ref\n1,1,0,0.5,0.5,1\n2,1,0,0.25,0.5,\n"
        );
    }

    #[test]
    fn monotonicity_summaries() {
        let t = trace(vec![step(1, 0.5, Some(2.0)), step(2, 0.25, Some(1.0))], Some(1.5));
        assert_eq!(t.max_fejer_increase(), Some(0.5));
        assert_eq!(t.max_residual_increase(), Some(-0.25));
        let s = t.summary();
        assert_eq!((s.iterations, s.final_residual), (2, Some(0.25)));
    }
}
