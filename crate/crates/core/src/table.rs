//! Canonical-model reward tables.
//!
//! Row `i` holds the i.i.d. draws of arm `i`; the `s`-th pull of arm `i`
//! reveals entry `(i, s)`. Each row is its own random stream, so a table can
//! be materialized up front or drawn lazily row by row with identical values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::rng::{self, StreamRng};

/// Source of canonical-model rewards consumed by the runner.
pub trait RewardSource {
    fn horizon(&self) -> u64;

    /// Entry `(arm, s)` with 0-based `s`. Callers read each row in order.
    fn entry(&mut self, arm: usize, s: usize) -> f64;
}

/// Fully materialized `k × T` reward table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardTable {
    rows: Vec<Vec<f64>>,
    horizon: u64,
    seed: u64,
}

pub fn build_reward_table(instance: &BanditInstance, horizon: u64, seed: u64) -> Result<RewardTable> {
    RewardTable::build(instance, horizon, seed)
}

impl RewardTable {
    pub fn build(instance: &BanditInstance, horizon: u64, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidHorizon(horizon, "must be at least 1"));
        }
        let rows = (0..instance.k())
            .map(|i| {
                let arm = instance.arm(i);
                let mut rng = rng::stream(seed, i as u64);
                (0..horizon).map(|_| arm.sample(&mut rng)).collect()
            })
            .collect();
        Ok(RewardTable { rows, horizon, seed })
    }

    /// Table from explicit rows, for tests and forced-violation checks.
    pub fn from_rows(rows: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let horizon = rows.first().map_or(0, Vec::len) as u64;
        if horizon == 0 || rows.iter().any(|r| r.len() as u64 != horizon) {
            return Err(Error::InvalidHorizon(horizon, "rows must be nonempty and of equal length"));
        }
        if rows.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::InvalidInstance("table entries must lie in [0, 1]".into()));
        }
        Ok(RewardTable { rows, horizon, seed })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, arm: usize) -> &[f64] {
        &self.rows[arm]
    }

    pub fn rows_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.rows
    }

    pub fn get(&self, arm: usize, s: usize) -> f64 {
        self.rows[arm][s]
    }

    /// Read-only cursor usable as a [`RewardSource`].
    pub fn source(&self) -> TableSource<'_> {
        TableSource(self)
    }
}

impl RewardSource for RewardTable {
    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn entry(&mut self, arm: usize, s: usize) -> f64 {
        self.rows[arm][s]
    }
}

pub struct TableSource<'a>(&'a RewardTable);

impl RewardSource for TableSource<'_> {
    fn horizon(&self) -> u64 {
        self.0.horizon
    }

    fn entry(&mut self, arm: usize, s: usize) -> f64 {
        self.0.rows[arm][s]
    }
}

/// Lazily drawn table: one cursor per row. Produces the same entries as
/// [`RewardTable::build`] with the same seed, but only draws what is read.
pub struct LazyTable<'a> {
    instance: &'a BanditInstance,
    horizon: u64,
    cursors: Vec<(StreamRng, usize)>,
}

impl<'a> LazyTable<'a> {
    pub fn new(instance: &'a BanditInstance, horizon: u64, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidHorizon(horizon, "must be at least 1"));
        }
        let cursors = (0..instance.k()).map(|i| (rng::stream(seed, i as u64), 0)).collect();
        Ok(LazyTable {
            instance,
            horizon,
            cursors,
        })
    }
}

impl RewardSource for LazyTable<'_> {
    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn entry(&mut self, arm: usize, s: usize) -> f64 {
        let (rng, next) = &mut self.cursors[arm];
        assert_eq!(s, *next, "lazy rows must be read in order");
        assert!((s as u64) < self.horizon, "row {arm} exhausted");
        *next += 1;
        self.instance.arm(arm).sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ArmSpec;

    #[test]
    fn point_mass_rows_are_constant() {
        let inst = BanditInstance::new(vec![ArmSpec::point_mass(0.7).unwrap()]).unwrap();
        let t = RewardTable::build(&inst, 5, 3).unwrap();
        assert_eq!(t.row(0), &[0.7; 5]);
    }

    #[test]
    fn bernoulli_row_mean_within_three_sigma() {
        // sd of the mean of 10^4 fair coins is 0.005; 3σ = 0.015 < 0.02
        let inst = BanditInstance::new(vec![ArmSpec::bernoulli(0.5).unwrap()]).unwrap();
        let t = RewardTable::build(&inst, 10_000, 42).unwrap();
        let mean = t.row(0).iter().sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "{mean}");
    }

    #[test]
    fn same_seed_same_table() {
        let inst = BanditInstance::new(vec![
            ArmSpec::bernoulli(0.4).unwrap(),
            ArmSpec::beta(2.0, 3.0).unwrap(),
        ])
        .unwrap();
        let a = RewardTable::build(&inst, 200, 9).unwrap();
        let b = RewardTable::build(&inst, 200, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, RewardTable::build(&inst, 200, 10).unwrap());
    }

    #[test]
    fn zero_horizon_rejected() {
        let inst = BanditInstance::new(vec![ArmSpec::bernoulli(0.4).unwrap()]).unwrap();
        assert!(matches!(RewardTable::build(&inst, 0, 1), Err(Error::InvalidHorizon(0, _))));
        assert!(LazyTable::new(&inst, 0, 1).is_err());
    }

    #[test]
    fn lazy_rows_match_materialized() {
        let inst = BanditInstance::new(vec![
            ArmSpec::bernoulli(0.3).unwrap(),
            ArmSpec::beta(0.5, 0.5).unwrap(),
        ])
        .unwrap();
        let table = RewardTable::build(&inst, 64, 77).unwrap();
        let mut lazy = LazyTable::new(&inst, 64, 77).unwrap();
        // interleave rows unevenly
        let (mut s0, mut s1) = (0, 0);
        for step in 0..96 {
            if step % 3 == 0 && s1 < 64 {
                assert_eq!(lazy.entry(1, s1), table.get(1, s1));
                s1 += 1;
            } else if s0 < 64 {
                assert_eq!(lazy.entry(0, s0), table.get(0, s0));
                s0 += 1;
            }
        }
    }

    #[test]
    fn entries_in_unit_interval() {
        let inst = BanditInstance::new(vec![
            ArmSpec::beta(0.2, 0.2).unwrap(),
            ArmSpec::bernoulli(0.9).unwrap(),
        ])
        .unwrap();
        let t = RewardTable::build(&inst, 2000, 5).unwrap();
        assert!((0..2).all(|i| t.row(i).iter().all(|x| (0.0..=1.0).contains(x))));
    }
}
