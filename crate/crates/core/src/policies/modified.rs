//! Modified NCB: uniform exploration until some arm's total observed reward
//! exceeds `420 c² ln W`, then maximization of the Nash confidence bound
//! `μ̂ + 2c sqrt(2 μ̂ ln W / n)` for the rest of the window.

use rand::Rng;

use super::{argmax_lowest, ArmStats, Phase, Policy, Stage};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

/// `μ̂ + 2c sqrt(2 μ̂ ln W / n)`; `+∞` for an unvisited arm.
pub fn modified_ncb_index(empirical_mean: f64, count: u64, window: u64, c: f64) -> f64 {
    if count == 0 {
        return f64::INFINITY;
    }
    let ln_w = (window as f64).ln();
    empirical_mean + 2.0 * c * (2.0 * empirical_mean * ln_w / count as f64).sqrt()
}

/// True once some arm's reward sum (`n_i μ̂_i`) strictly exceeds `threshold`.
pub fn modified_ncb_phase1_done(stats: &[ArmStats], threshold: f64) -> bool {
    stats.iter().any(|s| s.reward_sum > threshold)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedNcbConfig {
    pub k: usize,
    pub window: u64,
    pub c: f64,
    pub stop_threshold: f64,
}

impl ModifiedNcbConfig {
    pub fn new(k: usize, window: u64, c: f64) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidHorizon(window, "window must be at least 1"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        Ok(ModifiedNcbConfig {
            k,
            window,
            c,
            stop_threshold: Self::threshold(window, c),
        })
    }

    /// `420 c² ln W`.
    pub fn threshold(window: u64, c: f64) -> f64 {
        420.0 * c * c * (window as f64).ln()
    }
}

#[derive(Debug, Clone)]
pub struct ModifiedNcb {
    config: ModifiedNcbConfig,
    stats: Vec<ArmStats>,
    stage: Stage,
    rng: StreamRng,
    /// Rounds of uniform sampling executed so far.
    explore_rounds: u64,
}

impl ModifiedNcb {
    pub fn new(config: ModifiedNcbConfig, seed: u64) -> Self {
        Self::with_rng(config, rng::policy_stream(seed))
    }

    pub(crate) fn with_rng(config: ModifiedNcbConfig, rng: StreamRng) -> Self {
        ModifiedNcb {
            stats: vec![ArmStats::default(); config.k],
            stage: Stage::Explore,
            rng,
            explore_rounds: 0,
            config,
        }
    }

    pub fn config(&self) -> &ModifiedNcbConfig {
        &self.config
    }

    /// Number of uniform-sampling rounds before the switch (so far).
    pub fn explore_rounds(&self) -> u64 {
        self.explore_rounds
    }

    pub fn indices(&self) -> impl Iterator<Item = f64> + '_ {
        let ModifiedNcbConfig { window, c, .. } = self.config;
        self.stats
            .iter()
            .map(move |s| modified_ncb_index(s.empirical_mean(), s.count, window, c))
    }
}

impl Policy for ModifiedNcb {
    fn name(&self) -> &str {
        "modified_ncb"
    }

    fn k(&self) -> usize {
        self.config.k
    }

    fn select(&mut self, _t: u64) -> usize {
        // The stopping predicate is re-checked before every round; once it
        // fires the machine never returns to exploration.
        if self.stage == Stage::Explore
            && modified_ncb_phase1_done(&self.stats, self.config.stop_threshold)
        {
            self.stage = Stage::Exploit;
        }
        match self.stage {
            Stage::Explore => {
                self.explore_rounds += 1;
                self.rng.random_range(0..self.config.k)
            }
            Stage::Exploit => argmax_lowest(self.indices()),
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

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(sums: &[f64]) -> Vec<ArmStats> {
        sums.iter()
            .map(|&s| ArmStats {
                count: 1 + s as u64,
                reward_sum: s,
            })
            .collect()
    }

    #[test]
    fn index_examples() {
        assert_eq!(modified_ncb_index(0.0, 10, 100_000, 3.0), 0.0);
        assert_eq!(modified_ncb_index(0.4, 0, 100, 3.0), f64::INFINITY);
        assert!((modified_ncb_index(0.5, 200, 100_000, 3.0) - 1.939_557_773_656_424_4).abs() < 1e-12);
        assert_eq!(modified_ncb_index(0.7, 5, 1, 3.0), 0.7);
    }

    #[test]
    fn stopping_predicate_is_strict() {
        let t_e10 = 420.0 * 9.0 * 10.0;
        assert_eq!(t_e10, 37_800.0);
        assert!(!modified_ncb_phase1_done(&[ArmStats::default(); 3], 0.0));
        assert!(!modified_ncb_phase1_done(&stats(&[3781.0, 12.0]), t_e10));
        assert!(!modified_ncb_phase1_done(&stats(&[37_800.0, 0.0]), t_e10));
        assert!(modified_ncb_phase1_done(&stats(&[37_801.0, 0.0]), t_e10));
    }

    #[test]
    fn threshold_zero_only_at_unit_window() {
        assert_eq!(ModifiedNcbConfig::new(2, 1, 3.0).unwrap().stop_threshold, 0.0);
        assert!(ModifiedNcbConfig::new(2, 2, 3.0).unwrap().stop_threshold > 0.0);
        assert!(ModifiedNcbConfig::new(2, 2, 0.0).is_err());
    }

    #[test]
    fn unit_window_single_uniform_round() {
        let mut p = ModifiedNcb::new(ModifiedNcbConfig::new(3, 1, 3.0).unwrap(), 4);
        let arm = p.select(1);
        assert!(arm < 3);
        assert_eq!(p.phase().stage, Stage::Explore);
    }

    #[test]
    fn switches_once_and_never_back() {
        // tiny c so the threshold is crossed quickly with point-mass rewards
        let cfg = ModifiedNcbConfig::new(2, 1000, 0.05).unwrap();
        let mut p = ModifiedNcb::new(cfg, 8);
        let mut switched_at = None;
        for t in 1..=1000 {
            let arm = p.select(t);
            let stage = p.phase().stage;
            match (switched_at, stage) {
                (None, Stage::Exploit) => {
                    assert!(modified_ncb_phase1_done(p.stats(), cfg.stop_threshold));
                    switched_at = Some(t);
                }
                (Some(_), Stage::Explore) => panic!("returned to exploration at {t}"),
                _ => {}
            }
            p.update(arm, if arm == 0 { 1.0 } else { 0.2 });
        }
        let t_switch = switched_at.expect("threshold crossed");
        assert_eq!(p.explore_rounds(), t_switch - 1);
    }

    #[test]
    fn exploit_picks_argmax() {
        let cfg = ModifiedNcbConfig::new(2, 100, 3.0).unwrap();
        let mut p = ModifiedNcb::new(cfg, 1);
        p.stage = Stage::Exploit;
        p.stats = vec![
            ArmStats { count: 100, reward_sum: 20.0 },
            ArmStats { count: 100, reward_sum: 90.0 },
        ];
        assert_eq!(p.select(50), 1);
    }
}
