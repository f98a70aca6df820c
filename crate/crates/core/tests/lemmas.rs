//! Brute-force trajectory checks of the structural claims behind the regret bounds.

use nash_bandit::diagnostics::{
    check_e, check_g, counts_of, diagnose_replication, measure_tau, phase_two_small_arm_pulls,
    small_arm_lemma_applies, uniform_arm_sequence,
};
use nash_bandit::policies::{ModifiedNcb, ModifiedNcbConfig, PolicySpec, Stage};
use nash_bandit::runner::run_policy;
use nash_bandit::{rng, BanditInstance, Distribution, LazyTable, RewardTable};

fn two_arms(a: f64, b: f64) -> BanditInstance {
    BanditInstance::from_distributions(&[Distribution::Bernoulli { p: a }, Distribution::Bernoulli { p: b }]).unwrap()
}

#[test]
fn small_arms_are_never_exploited_under_g() {
    let inst = two_arms(0.9, 0.05);
    let t = 100_000;
    assert!(small_arm_lemma_applies(&inst, t).unwrap());
    let mut held = 0;
    for r in 0..20 {
        let seed = rng::derive_seed(31, &[r]);
        let table = RewardTable::build(&inst, t, seed).unwrap();
        let mut p = PolicySpec::Ncb.build(2, t, seed).unwrap();
        let traj = run_policy(p.as_mut(), &inst, &mut table.source()).unwrap();
        let explore: Vec<usize> =
            traj.pulls.iter().filter(|p| p.phase.stage == Stage::Explore).map(|p| p.arm).collect();
        let g = check_g(&table, &inst, t, explore.len() as u64, &counts_of(&explore, 2)).unwrap();
        if g.holds() {
            held += 1;
            assert_eq!(phase_two_small_arm_pulls(&traj, &inst), 0, "replication {r}");
        }
    }
    assert!(held >= 18);
}

#[test]
fn phase_one_pulls_match_the_reference_uniform_sequence() {
    let inst = two_arms(0.7, 0.3);
    let t = 50_000;
    let seed = 9;
    let table = RewardTable::build(&inst, t, seed).unwrap();
    let mut p = PolicySpec::Ncb.build(2, t, seed).unwrap();
    let traj = run_policy(p.as_mut(), &inst, &mut table.source()).unwrap();
    let explore: Vec<usize> = traj.pulls.iter().filter(|p| p.phase.stage == Stage::Explore).map(|p| p.arm).collect();
    assert_eq!(explore, uniform_arm_sequence(seed, 2, explore.len()));
}

#[test]
fn tau_is_bracketed_when_e_holds() {
    let inst = two_arms(0.9, 0.01);
    let t = 200_000;
    for r in 0..10 {
        let (_, e, tau) = diagnose_replication(&inst, t, 3.0, rng::derive_seed(32, &[r])).unwrap();
        let (e, tau) = (e.unwrap(), tau.unwrap());
        if e.holds() {
            assert!(tau.truncated || tau.in_bracket(), "{tau:?}");
        }
    }
}

#[test]
fn measured_tau_matches_policy_exploration() {
    let inst = BanditInstance::from_distributions(&[
        Distribution::Bernoulli { p: 0.9 },
        Distribution::Beta { alpha: 2.0, beta: 5.0 },
        Distribution::Bernoulli { p: 0.4 },
    ])
    .unwrap();
    let t = 250_000;
    for seed in [1u64, 2, 3] {
        let tau = measure_tau(&inst, t, t, 3.0, seed).unwrap();
        let mut p = ModifiedNcb::new(ModifiedNcbConfig::new(3, t, 3.0).unwrap(), seed);
        let mut table = LazyTable::new(&inst, t, seed).unwrap();
        run_policy(&mut p, &inst, &mut table).unwrap();
        assert!(!tau.truncated);
        assert_eq!(p.explore_rounds(), tau.tau);
    }
}

#[test]
fn event_checks_are_pure() {
    let inst = two_arms(0.8, 0.1);
    let t = 20_000;
    let table = RewardTable::build(&inst, t, 4).unwrap();
    let pulls = uniform_arm_sequence(4, 2, t as usize);
    let a = check_e(&table, &inst, t, 3.0, &pulls).unwrap();
    let b = check_e(&table, &inst, t, 3.0, &pulls).unwrap();
    assert_eq!(a, b);
}
