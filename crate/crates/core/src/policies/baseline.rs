use rand::Rng;

use super::{ArmStats, Phase, Policy, Stage};
use crate::rng::{self, StreamRng};

/// Uniformly random arm every round.
#[derive(Debug, Clone)]
pub struct Uniform {
    stats: Vec<ArmStats>,
    rng: StreamRng,
}

impl Uniform {
    pub fn new(k: usize, seed: u64) -> Self {
        Uniform {
            stats: vec![ArmStats::default(); k],
            rng: rng::policy_stream(seed),
        }
    }
}

impl Policy for Uniform {
    fn name(&self) -> &str {
        "uniform"
    }

    fn k(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, _t: u64) -> usize {
        self.rng.random_range(0..self.stats.len())
    }

    fn update(&mut self, arm: usize, reward: f64) {
        self.stats[arm].record(reward);
    }

    fn phase(&self) -> Phase {
        Phase::new(1, Stage::Explore)
    }

    fn stats(&self) -> &[ArmStats] {
        &self.stats
    }
}

/// Always pulls the same arm.
#[derive(Debug, Clone)]
pub struct Constant {
    arm: usize,
    stats: Vec<ArmStats>,
}

impl Constant {
    pub fn new(k: usize, arm: usize) -> Self {
        Constant {
            arm,
            stats: vec![ArmStats::default(); k],
        }
    }
}

impl Policy for Constant {
    fn name(&self) -> &str {
        "constant"
    }

    fn k(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, _t: u64) -> usize {
        self.arm
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
