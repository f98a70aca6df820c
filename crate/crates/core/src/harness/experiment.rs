use serde::Serialize;

use super::config::{ExperimentConfig, FORMAT_VERSION};
use super::slope::{fit_loglog_slope, SlopeFit};
use crate::diagnostics::{self, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::metrics::{Ensemble, RegretReport, ReplicationSummary, SummaryBuilder};
use crate::policies::PolicySpec;
use crate::rng::{derive_seed, label_hash, replication_seed};
use crate::runner::run_policy_with;
use crate::table::LazyTable;

/// How replications are scheduled. Both modes produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub policy: String,
    pub k: usize,
    pub horizon: u64,
    pub replications: usize,
    /// Base seed of the experiment; replication seeds derive from it.
    pub seed: u64,
    pub report: RegretReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    /// One fit per policy with at least three usable horizons.
    pub slopes: Vec<SlopeFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<DiagnosticsReport>,
}

impl SweepResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn map_reps<T, F>(reps: usize, exec: Execution, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        // collect keeps replication order, so the reduction is deterministic
        return (0..reps as u64).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..reps as u64).map(f).collect()
}

/// One replication: fresh table and policy seeded by `seed`.
pub fn run_replication(
    instance: &BanditInstance,
    spec: &PolicySpec,
    horizon: u64,
    seed: u64,
    ensemble: &Ensemble,
) -> Result<ReplicationSummary> {
    let mut table = LazyTable::new(instance, horizon, seed)?;
    let mut policy = spec.build(instance.k(), horizon, seed)?;
    let mut builder = SummaryBuilder::new(ensemble);
    run_policy_with(policy.as_mut(), instance, &mut table, |p| builder.observe(&p))?;
    Ok(builder.finish())
}

/// `replications` runs of one policy at one horizon, reduced to an ensemble.
pub fn run_cell(
    instance: &BanditInstance,
    spec: &PolicySpec,
    horizon: u64,
    replications: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<Ensemble> {
    let label = spec.label();
    let mut ensemble = Ensemble::new(instance, horizon)?;
    let template = ensemble.clone();
    let summaries = map_reps(replications, exec, |r| {
        let seed = replication_seed(base_seed, &label, horizon, r);
        run_replication(instance, spec, horizon, seed, &template)
    })?;
    for s in summaries {
        ensemble.push(s)?;
    }
    Ok(ensemble)
}

pub fn run_experiment(config: &ExperimentConfig, exec: Execution) -> Result<SweepResult> {
    config.validate()?;
    let instance = config.instance()?;
    let mut rows = Vec::new();
    for spec in &config.policies {
        for &horizon in &config.horizons {
            let ensemble = run_cell(&instance, spec, horizon, config.replications, config.base_seed, exec)?;
            rows.push(SweepRow {
                policy: spec.label(),
                k: instance.k(),
                horizon,
                replications: config.replications,
                seed: config.base_seed,
                report: RegretReport::from_ensemble(&ensemble, &config.metrics.p_values)?,
            });
        }
    }
    let mut warnings = Vec::new();
    let mut slopes = Vec::new();
    for spec in &config.policies {
        let label = spec.label();
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.policy == label && !r.report.welfare_is_zero)
            .map(|r| (r.horizon as f64, r.report.nash_regret))
            .collect();
        match fit_loglog_slope(&label, &points) {
            Ok(fit) => {
                warnings.extend(fit.warnings.iter().cloned());
                slopes.push(fit);
            }
            Err(Error::NotEnoughData { usable }) if config.horizons.len() >= 3 => {
                warnings.push(format!("{label}: no slope, only {usable} usable horizons"));
            }
            Err(Error::NotEnoughData { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let diagnostics = if config.metrics.diagnostics {
        diagnose_experiment(config, exec)?
    } else {
        Vec::new()
    };
    Ok(SweepResult {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        rows,
        slopes,
        warnings,
        diagnostics,
    })
}

/// Good-event and `τ` diagnostics for every horizon of the config.
pub fn diagnose_experiment(config: &ExperimentConfig, exec: Execution) -> Result<Vec<DiagnosticsReport>> {
    config.validate()?;
    let instance = config.instance()?;
    let c = config.diagnostics_c();
    config
        .horizons
        .iter()
        .map(|&horizon| {
            if horizon < 2 {
                return Err(Error::InvalidHorizon(horizon, "diagnostics need T >= 2"));
            }
            let results = map_reps(config.replications, exec, |r| {
                let seed = derive_seed(config.base_seed, &[label_hash("diagnostics"), horizon, r]);
                diagnostics::diagnose_replication(&instance, horizon, c, seed)
            })?;
            diagnostics::summarize_diagnostics(&instance, horizon, results)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::format::results_csv;
    use crate::instance::Distribution;
    use crate::metrics::per_round_means;

    fn config(arms: Vec<Distribution>, policies: Vec<PolicySpec>, horizons: Vec<u64>, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            format_version: 1,
            name: None,
            arms,
            policies,
            horizons,
            replications: reps,
            base_seed: 2024,
            metrics: Default::default(),
            output: Default::default(),
        }
    }

    #[test]
    fn constant_optimal_point_mass_row_is_zero() {
        let cfg = config(
            vec![Distribution::PointMass { value: 0.8 }, Distribution::PointMass { value: 0.3 }],
            vec![PolicySpec::Constant { arm: 0 }],
            vec![10],
            1,
        );
        let res = run_experiment(&cfg, Execution::Serial).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].report.nash_regret, 0.0);
        assert!(res.slopes.is_empty());
    }

    #[test]
    fn serial_and_parallel_are_identical() {
        let cfg = config(
            vec![Distribution::Bernoulli { p: 0.7 }, Distribution::Beta { alpha: 2.0, beta: 5.0 }],
            vec![PolicySpec::Ncb, PolicySpec::Anytime { c: 3.0 }, PolicySpec::Ucb],
            vec![50, 100, 200],
            16,
        );
        let a = run_experiment(&cfg, Execution::Parallel).unwrap();
        let b = run_experiment(&cfg, Execution::Serial).unwrap();
        assert_eq!(results_csv(&a.rows), results_csv(&b.rows));
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn uniform_two_point_masses_average_half() {
        let inst = BanditInstance::from_distributions(&[
            Distribution::PointMass { value: 1.0 },
            Distribution::PointMass { value: 0.0 },
        ])
        .unwrap();
        let r = 2000;
        let e = run_cell(&inst, &PolicySpec::Uniform, 20, r, 5, Execution::Serial).unwrap();
        let pr = per_round_means(&e).unwrap();
        // each value is a mean of r fair coins: sd = 0.5/sqrt(r)
        let sd = 0.5 / (r as f64).sqrt();
        for (v, se) in pr.values.iter().zip(&pr.standard_errors) {
            assert!((v - 0.5).abs() < 4.0 * sd, "{v}");
            assert!((se - sd).abs() < 0.1 * sd);
        }
    }
}
