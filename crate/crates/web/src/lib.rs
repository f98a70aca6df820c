//! Browser bindings: index curves, a small simulation and the UCB counterexample.
//!
//! Every export returns a JSON string; the plain `*_json` functions hold the
//! logic so it can be exercised natively.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use nash_bandit::harness::{counterexample_command, run_cell, Execution};
use nash_bandit::metrics::{average_regret, nash_regret, per_round_means};
use nash_bandit::policies::{modified_ncb_index, ncb_index, ucb_index, DEFAULT_C};
use nash_bandit::{BanditInstance, Distribution, PolicySpec, Result};

const MAX_POINTS: usize = 400;

#[derive(Serialize)]
struct Curves {
    n: Vec<u64>,
    ncb: Vec<f64>,
    modified_ncb: Vec<f64>,
    ucb: Vec<f64>,
}

pub fn index_curves_json(mean: f64, horizon: u64, max_pulls: u64) -> Result<String> {
    if !(0.0..=1.0).contains(&mean) {
        return Err(nash_bandit::Error::InvalidParameter(format!("mean {mean} outside [0, 1]")));
    }
    if horizon < 2 {
        return Err(nash_bandit::Error::InvalidHorizon(horizon, "need T >= 2"));
    }
    let max_pulls = max_pulls.max(1);
    let step = max_pulls.div_ceil(MAX_POINTS as u64).max(1);
    let n: Vec<u64> = (1..=max_pulls).step_by(step as usize).collect();
    let curves = Curves {
        ncb: n.iter().map(|&n| ncb_index(mean, n, horizon)).collect(),
        modified_ncb: n.iter().map(|&n| modified_ncb_index(mean, n, horizon, DEFAULT_C)).collect(),
        ucb: n.iter().map(|&n| ucb_index(mean, n, horizon)).collect(),
        n,
    };
    Ok(serde_json::to_string(&curves).expect("curves serialize"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimRequest {
    arms: Vec<Distribution>,
    policy: PolicySpec,
    horizon: u64,
    replications: usize,
    seed: u64,
}

#[derive(Serialize)]
struct SimResponse {
    optimal_mean: f64,
    nash_regret: f64,
    average_regret: f64,
    /// Round numbers (1-based) of the sampled per-round means.
    rounds: Vec<u64>,
    mean_reward: Vec<f64>,
}

/// Runs one policy and returns regrets plus a downsampled per-round mean curve.
pub fn simulate_json(request: &str) -> Result<String> {
    let req: SimRequest =
        serde_json::from_str(request).map_err(|e| nash_bandit::Error::Config(format!("bad request: {e}")))?;
    if req.replications == 0 || req.replications > 2000 || req.horizon > 200_000 {
        return Err(nash_bandit::Error::InvalidParameter(
            "demo limits: 1..=2000 replications, T <= 200000".into(),
        ));
    }
    let instance = BanditInstance::from_distributions(&req.arms)?;
    req.policy.validate(instance.k(), req.horizon)?;
    let ensemble = run_cell(&instance, &req.policy, req.horizon, req.replications, req.seed, Execution::Serial)?;
    let per_round = per_round_means(&ensemble)?;
    let mu = instance.optimal_mean();
    let step = per_round.values.len().div_ceil(MAX_POINTS).max(1);
    let rounds: Vec<u64> = (0..per_round.values.len()).step_by(step).map(|t| t as u64 + 1).collect();
    let resp = SimResponse {
        optimal_mean: mu,
        nash_regret: nash_regret(&per_round, mu),
        average_regret: average_regret(&per_round, mu),
        mean_reward: rounds.iter().map(|&t| per_round.values[t as usize - 1]).collect(),
        rounds,
    };
    Ok(serde_json::to_string(&resp).expect("response serializes"))
}

#[derive(Serialize)]
struct Comparison {
    ln_mu1: f64,
    ncb_phase1_rounds: u64,
    ucb_nash_regret: f64,
    ncb_nash_regret: f64,
    ucb_average_regret: f64,
    ncb_average_regret: f64,
}

/// UCB against NCB on the two-arm instance where UCB's Nash regret stays near 1.
pub fn counterexample_json(horizon: u64, replications: usize, seed: u64) -> Result<String> {
    if replications == 0 || replications > 500 || horizon > 100_000 {
        return Err(nash_bandit::Error::InvalidParameter(
            "demo limits: 1..=500 replications, T <= 100000".into(),
        ));
    }
    let rep = counterexample_command(horizon, replications, seed, Execution::Serial)?;
    let ucb = rep.report("ucb").expect("ucb row");
    let ncb = rep.report("ncb").expect("ncb row");
    let out = Comparison {
        ln_mu1: rep.ln_mu1,
        ncb_phase1_rounds: rep.ncb_phase1_rounds,
        ucb_nash_regret: ucb.nash_regret,
        ncb_nash_regret: ncb.nash_regret,
        ucb_average_regret: ucb.average_regret,
        ncb_average_regret: ncb.average_regret,
    };
    Ok(serde_json::to_string(&out).expect("comparison serializes"))
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = indexCurves)]
pub fn index_curves(mean: f64, horizon: u64, max_pulls: u64) -> std::result::Result<String, JsError> {
    js(index_curves_json(mean, horizon, max_pulls))
}

#[wasm_bindgen]
pub fn simulate(request: &str) -> std::result::Result<String, JsError> {
    js(simulate_json(request))
}

#[wasm_bindgen]
pub fn counterexample(horizon: u64, replications: usize, seed: u64) -> std::result::Result<String, JsError> {
    js(counterexample_json(horizon, replications, seed))
}
