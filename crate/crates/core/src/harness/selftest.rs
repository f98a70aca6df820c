//! Fast property checks behind the `selftest` subcommand.

use rand::Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{run_experiment, Execution};
use super::format::results_csv;
use crate::diagnostics::claim1_oracle;
use crate::error::Result;
use crate::instance::Distribution;
use crate::metrics::power_mean_ln;
use crate::policies::{modified_ncb_index, ncb_index, Anytime, Policy, PolicySpec};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_owned(),
        passed,
        detail,
    }
}

pub fn selftest(exec: Execution) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let mut rng = rng::stream(0x5e1f, 0);

    let n = 100_000;
    let mut failures = 0;
    for _ in 0..n {
        let x = rng.random_range(0.0..=0.5);
        let a = rng.random_range(0.0..=1.0);
        if !claim1_oracle(x, a)? {
            failures += 1;
        }
    }
    out.push(outcome("claim1_sweep", failures == 0, format!("{failures} of {n} pairs violate (1-x)^a >= 1-2ax")));

    let mut bad = 0;
    for _ in 0..2000 {
        let mu = rng.random_range(0.0..=1.0);
        let n1 = rng.random_range(1..10_000u64);
        let n2 = n1 + rng.random_range(1..1000u64);
        let t = rng.random_range(2..1_000_000u64);
        if ncb_index(mu, n2, t) > ncb_index(mu, n1, t) || modified_ncb_index(mu, n2, t, 3.0) > modified_ncb_index(mu, n1, t, 3.0) {
            bad += 1;
        }
        let mu2 = (mu + rng.random_range(0.0..=0.1)).min(1.0);
        if ncb_index(mu2, n1, t) < ncb_index(mu, n1, t) {
            bad += 1;
        }
    }
    out.push(outcome("index_monotonicity", bad == 0, format!("{bad} violations")));

    let mut bad = 0;
    for _ in 0..500 {
        let ln_vals: Vec<f64> = (0..20).map(|_| rng.random_range(0.01f64..=1.0).ln()).collect();
        let ps = [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0];
        let ms: Vec<f64> = ps.iter().map(|&p| power_mean_ln(&ln_vals, p)).collect::<Result<_>>()?;
        bad += ms.windows(2).filter(|w| w[0] > w[1] + 1e-12).count();
    }
    out.push(outcome("p_mean_monotonicity", bad == 0, format!("{bad} violations")));

    let mut p = Anytime::new(3, 3.0, 99)?;
    for t in 1..=5000 {
        let arm = p.select(t);
        p.update(arm, 0.5);
    }
    let schedule_ok = p.epochs().iter().all(|e| e.window == 1 << (e.epoch - 1) && e.rounds_before == e.window - 1);
    out.push(outcome("anytime_schedule", schedule_ok, format!("{} epochs checked", p.epochs().len())));

    let cfg = ExperimentConfig {
        format_version: 1,
        name: Some("selftest".into()),
        arms: vec![
            Distribution::Beta { alpha: 6.0, beta: 2.0 },
            Distribution::Bernoulli { p: 0.5 },
            Distribution::PointMass { value: 0.3 },
        ],
        policies: vec![PolicySpec::Ncb, PolicySpec::ModifiedNcb { c: 3.0, window: None }, PolicySpec::Ucb, PolicySpec::Anytime { c: 3.0 }],
        horizons: vec![64, 256],
        replications: 50,
        base_seed: 11,
        metrics: Default::default(),
        output: Default::default(),
    };
    let a = run_experiment(&cfg, exec)?;
    let am_gm_bad = a.rows.iter().filter(|r| !r.report.satisfies_am_gm(1e-12)).count();
    out.push(outcome("am_gm_ordering", am_gm_bad == 0, format!("{am_gm_bad} of {} rows violate", a.rows.len())));
    let b = run_experiment(&cfg, Execution::Serial)?;
    let same = results_csv(&a.rows) == results_csv(&b.rows);
    out.push(outcome("determinism", same, "repeat serial run reproduces the CSV bytes".into()));
    Ok(out)
}
