//! Drives a policy against a reward source for `T` rounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::policies::{Phase, Policy};
use crate::table::RewardSource;

/// One round of play. `arm` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pull {
    pub round: u64,
    pub arm: usize,
    pub reward: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub policy: String,
    pub horizon: u64,
    pub pulls: Vec<Pull>,
}

impl Trajectory {
    pub fn arms(&self) -> impl Iterator<Item = usize> + '_ {
        self.pulls.iter().map(|p| p.arm)
    }
}

/// Plays `source.horizon()` rounds, handing each pull to `on_pull`.
///
/// The reward of round `t` is entry `(I_t, s)` of the table where `s` counts
/// earlier pulls of `I_t`.
pub fn run_policy_with<P, S, F>(
    policy: &mut P,
    instance: &BanditInstance,
    source: &mut S,
    mut on_pull: F,
) -> Result<()>
where
    P: Policy + ?Sized,
    S: RewardSource + ?Sized,
    F: FnMut(Pull),
{
    let k = instance.k();
    if policy.k() != k {
        return Err(Error::PolicyContractViolation {
            policy: policy.name().to_owned(),
            arm: policy.k(),
            round: 0,
            k,
        });
    }
    let mut drawn = vec![0usize; k];
    for round in 1..=source.horizon() {
        let arm = policy.select(round);
        if arm >= k {
            return Err(Error::PolicyContractViolation {
                policy: policy.name().to_owned(),
                arm,
                round,
                k,
            });
        }
        let phase = policy.phase();
        let reward = source.entry(arm, drawn[arm]);
        drawn[arm] += 1;
        policy.update(arm, reward);
        on_pull(Pull {
            round,
            arm,
            reward,
            phase,
        });
    }
    Ok(())
}

pub fn run_policy<P, S>(policy: &mut P, instance: &BanditInstance, source: &mut S) -> Result<Trajectory>
where
    P: Policy + ?Sized,
    S: RewardSource + ?Sized,
{
    let mut pulls = Vec::with_capacity(source.horizon() as usize);
    run_policy_with(policy, instance, source, |p| pulls.push(p))?;
    Ok(Trajectory {
        policy: policy.name().to_owned(),
        horizon: source.horizon(),
        pulls,
    })
}
