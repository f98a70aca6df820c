use serde::Serialize;

use super::config::FORMAT_VERSION;
use super::experiment::{run_cell, Execution, SweepRow};
use crate::error::{Error, Result};
use crate::instance::counterexample_instance;
use crate::metrics::RegretReport;
use crate::policies::{phase1_length, PolicySpec};

/// UCB versus NCB on the two-arm instance `((2e)^-T, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub format_version: u32,
    pub horizon: u64,
    pub replications: usize,
    pub seed: u64,
    /// Exact `ln μ₁ = −T ln(2e)`.
    pub ln_mu1: f64,
    /// `μ₁` underflowed and its sampling probability was clamped to `f64::MIN_POSITIVE`.
    pub mu1_clamped: bool,
    /// Whether `T > 25 ln T`.
    pub precondition_met: bool,
    pub ncb_phase1_rounds: u64,
    pub rows: Vec<SweepRow>,
}

impl CounterexampleReport {
    pub fn report(&self, policy: &str) -> Option<&RegretReport> {
        self.rows.iter().find(|r| r.policy == policy).map(|r| &r.report)
    }
}

pub fn counterexample_command(
    horizon: u64,
    replications: usize,
    seed: u64,
    exec: Execution,
) -> Result<CounterexampleReport> {
    if horizon < 2 {
        return Err(Error::InvalidHorizon(horizon, "the counterexample needs T >= 2"));
    }
    if replications < 1 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    let ce = counterexample_instance(horizon)?;
    let rows = [PolicySpec::Ucb, PolicySpec::Ncb]
        .iter()
        .map(|spec| {
            let e = run_cell(&ce.instance, spec, horizon, replications, seed, exec)?;
            Ok(SweepRow {
                policy: spec.label(),
                k: 2,
                horizon,
                replications,
                seed,
                report: RegretReport::from_ensemble(&e, &[])?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CounterexampleReport {
        format_version: FORMAT_VERSION,
        horizon,
        replications,
        seed,
        ln_mu1: ce.instance.arm(0).ln_mean,
        mu1_clamped: ce.clamped,
        precondition_met: ce.precondition_met,
        ncb_phase1_rounds: phase1_length(2, horizon)?,
        rows,
    })
}
