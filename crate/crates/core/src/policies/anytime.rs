//! Horizon-oblivious wrapper built on the doubling trick.
//!
//! Epoch `h` lasts `W_h = 2^(h-1)` rounds and starts after `R_h = W_h - 1`
//! rounds. At the start of each epoch a coin with bias `1/W_h²` decides
//! between plain uniform sampling and a fresh Modified NCB run with window
//! `W_h`. Nothing carries over between epochs except the global statistics.

use rand::Rng;
use serde::Serialize;

use super::{ArmStats, ModifiedNcb, ModifiedNcbConfig, Phase, Policy, Stage};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Uniform,
    Ncb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpochRecord {
    /// 1-based epoch index `h`.
    pub epoch: u32,
    pub window: u64,
    /// Rounds executed before this epoch began.
    pub rounds_before: u64,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct Anytime {
    k: usize,
    c: f64,
    rng: StreamRng,
    stats: Vec<ArmStats>,
    epochs: Vec<EpochRecord>,
    /// Rounds played inside the current epoch.
    played_in_epoch: u64,
    inner: Option<ModifiedNcb>,
    stage: Stage,
}

impl Anytime {
    pub fn new(k: usize, c: f64, seed: u64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        Ok(Anytime {
            k,
            c,
            rng: rng::policy_stream(seed),
            stats: vec![ArmStats::default(); k],
            epochs: Vec::new(),
            played_in_epoch: 0,
            inner: None,
            stage: Stage::Explore,
        })
    }

    /// Epochs started so far, in order.
    pub fn epochs(&self) -> &[EpochRecord] {
        &self.epochs
    }

    /// Draws the branch for an epoch with window `w`: uniform with probability `1/w²`.
    pub fn draw_branch<R: Rng + ?Sized>(rng: &mut R, window: u64) -> Branch {
        let w = window as f64;
        if rng.random::<f64>() < 1.0 / (w * w) {
            Branch::Uniform
        } else {
            Branch::Ncb
        }
    }

    fn start_epoch(&mut self) -> Result<()> {
        let (epoch, window, rounds_before) = match self.epochs.last() {
            None => (1, 1, 0),
            Some(prev) => (prev.epoch + 1, prev.window * 2, prev.rounds_before + prev.window),
        };
        let branch = Self::draw_branch(&mut self.rng, window);
        self.inner = match branch {
            Branch::Uniform => None,
            Branch::Ncb => {
                let seed = self.rng.random::<u64>();
                let cfg = ModifiedNcbConfig::new(self.k, window, self.c)?;
                Some(ModifiedNcb::with_rng(cfg, rng::policy_stream(seed)))
            }
        };
        self.epochs.push(EpochRecord {
            epoch,
            window,
            rounds_before,
            branch,
        });
        self.played_in_epoch = 0;
        Ok(())
    }
}

impl Policy for Anytime {
    fn name(&self) -> &str {
        "anytime"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn select(&mut self, t: u64) -> usize {
        let epoch_over = self.epochs.last().is_none_or(|e| self.played_in_epoch == e.window);
        if epoch_over {
            // window and c were validated in `new`
            self.start_epoch().expect("valid epoch parameters");
        }
        let current = *self.epochs.last().expect("an epoch is running");
        debug_assert_eq!(t, current.rounds_before + self.played_in_epoch + 1);
        self.played_in_epoch += 1;
        match self.inner.as_mut() {
            None => {
                self.stage = Stage::Explore;
                self.rng.random_range(0..self.k)
            }
            Some(inner) => {
                let arm = inner.select(self.played_in_epoch);
                self.stage = inner.phase().stage;
                arm
            }
        }
    }

    fn update(&mut self, arm: usize, reward: f64) {
        self.stats[arm].record(reward);
        if let Some(inner) = self.inner.as_mut() {
            inner.update(arm, reward);
        }
    }

    fn phase(&self) -> Phase {
        Phase::new(self.epochs.last().map_or(1, |e| e.epoch), self.stage)
    }

    fn stats(&self) -> &[ArmStats] {
        &self.stats
    }
}
