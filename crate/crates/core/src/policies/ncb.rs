//! Nash Confidence Bound: a fixed uniform-exploration prefix followed by
//! maximization of an index whose width scales with the empirical mean.

use rand::Rng;

use super::{argmax_lowest, ArmStats, Phase, Policy, Stage};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// Length of the uniform-exploration prefix:
/// `min(T, ceil(16 sqrt(k T ln T / ln k)))`, and 0 when `k = 1`.
pub fn phase1_length(k: usize, horizon: u64) -> Result<u64> {
    if horizon < 2 {
        return Err(Error::InvalidHorizon(horizon, "phase-one length needs T >= 2"));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(0);
    }
    let (k, t) = (k as f64, horizon as f64);
    let raw = 16.0 * (k * t * t.ln() / k.ln()).sqrt();
    Ok(if raw >= t { horizon } else { raw.ceil() as u64 })
}

/// `μ̂ + 4 sqrt(μ̂ ln T / n)`; `+∞` for an unvisited arm.
pub fn ncb_index(empirical_mean: f64, count: u64, horizon: u64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    let ln_t = (horizon as f64).ln();
    empirical_mean + 4.0 * (empirical_mean * ln_t / count as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcbConfig {
    pub k: usize,
    pub horizon: u64,
    pub phase1_rounds: u64,
}

impl NcbConfig {
    pub fn new(k: usize, horizon: u64) -> Result<Self> {
        Ok(NcbConfig {
            k,
            horizon,
            phase1_rounds: phase1_length(k, horizon)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Ncb {
    config: NcbConfig,
    stats: Vec<ArmStats>,
    stage: Stage,
    rng: StreamRng,
}

impl Ncb {
    pub fn new(config: NcbConfig, seed: u64) -> Self {
        Ncb {
            stats: vec![ArmStats::default(); config.k],
            stage: Stage::Explore,
            rng: rng::policy_stream(seed),
            config,
        }
    }

    pub fn config(&self) -> &NcbConfig {
        &self.config
    }

    pub fn indices(&self) -> impl Iterator<Item = f64> + '_ {
        let t = self.config.horizon;
        self.stats.iter().map(move |s| ncb_index(s.empirical_mean(), s.count, t))
    }
}

impl Policy for Ncb {
    fn name(&self) -> &str {
        "ncb"
    }

    fn k(&self) -> usize {
        self.config.k
    }

    fn select(&mut self, t: u64) -> usize {
        if t <= self.config.phase1_rounds {
            self.stage = Stage::Explore;
            self.rng.random_range(0..self.config.k)
        } else {
            self.stage = Stage::Exploit;
            argmax_lowest(self.indices())
        }
    }

    fn update(&mut self, arm: usize, reward: f64) {
        self.stats[arm].record(reward);
    }

    fn phase(&self) -> Phase {
        Phase::new(1, self.stage)
    }

    fn stats(&self) -> &[ArmStats] {
        &self.stats
    }
}
