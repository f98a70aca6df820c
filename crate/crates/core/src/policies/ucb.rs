use super::{argmax_lowest, ArmStats, Phase, Policy, Stage};
use crate::error::{Error, Result};

/// Classic UCB index `μ̂ + sqrt(2 ln T / n)`; `+∞` for an unvisited arm.
pub fn ucb_index(empirical_mean: f64, count: u64, horizon: u64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    empirical_mean + (2.0 * (horizon as f64).ln() / count as f64).sqrt()
}

/// Horizon-aware UCB with lowest-index tie-breaking. Deterministic.
#[derive(Debug, Clone)]
pub struct Ucb {
    horizon: u64,
    stats: Vec<ArmStats>,
}

impl Ucb {
    pub fn new(k: usize, horizon: u64) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidHorizon(horizon, "UCB needs T >= 2"));
        }
        Ok(Ucb {
            horizon,
            stats: vec![ArmStats::default(); k],
        })
    }
}

impl Policy for Ucb {
    fn name(&self) -> &str {
        "ucb"
    }

    fn k(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, _t: u64) -> usize {
        let t = self.horizon;
        argmax_lowest(self.stats.iter().map(|s| ucb_index(s.empirical_mean(), s.count, t)))
    }

    fn update(&mut self, arm: usize, reward: f64) {
        self.stats[arm].record(reward);
    }

    fn phase(&self) -> Phase {
        Phase::new(1, Stage::Exploit)
    }

    fn stats(&self) -> &[ArmStats] {
        &self.stats
    }
}
