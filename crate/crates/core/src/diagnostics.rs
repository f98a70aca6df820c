//! Empirical checks of the concentration ("good") events, the exploration
//! stopping time `τ`, and the numeric inequality `(1−x)^a ≥ 1 − 2ax`.
//!
//! The event checks work on the canonical reward table: prefix empirical
//! means `μ̂_{i,s}` are read off row `i` for every `s` in the stated range,
//! including counts the algorithm itself never reaches.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::policies::{phase1_length, ModifiedNcbConfig, Stage};
use crate::rng;
use crate::runner::Trajectory;
use crate::table::{LazyTable, RewardSource, RewardTable};

/// Outcome of one sub-event on one replication. A sub-event whose mean
/// threshold selects no arm holds vacuously and is marked not applicable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubEvent {
    pub holds: bool,
    pub applicable: bool,
}

impl SubEvent {
    fn vacuous() -> Self {
        SubEvent {
            holds: true,
            applicable: false,
        }
    }
}

/// Three sub-events evaluated on one replication (G₁..G₃ or E₁..E₃).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EventCheck {
    pub parts: [SubEvent; 3],
}

impl EventCheck {
    pub fn holds(&self) -> bool {
        self.parts.iter().all(|p| p.holds)
    }
}

/// Arms that select the same sub-event, by mean.
fn split_arms(instance: &BanditInstance, threshold: f64) -> (Vec<usize>, Vec<usize>) {
    (0..instance.k()).partition(|&i| instance.arm(i).mean > threshold)
}

/// Checks `pred(s, μ̂_{i,s})` for every `s` in `[s_min, len]` of row `i`.
fn prefix_means_all(row: &[f64], s_min: usize, mut pred: impl FnMut(usize, f64) -> bool) -> bool {
    let mut sum = 0.0;
    for (idx, &x) in row.iter().enumerate() {
        sum += x;
        let s = idx + 1;
        if s >= s_min && !pred(s, sum / s as f64) {
            return false;
        }
    }
    true
}

/// `sqrt(k ln k ln T / T)`, the scale of the NCB event thresholds.
fn ncb_scale(k: usize, horizon: u64) -> f64 {
    let (k, t) = (k as f64, horizon as f64);
    (k * k.ln() * t.ln() / t).sqrt()
}

/// Evaluates G₁ (Phase-I counts), G₂ and G₃ (prefix means of the table).
pub fn check_g(
    table: &RewardTable,
    instance: &BanditInstance,
    horizon: u64,
    phase1_rounds: u64,
    phase1_counts: &[u64],
) -> Result<EventCheck> {
    let k = instance.k();
    if phase1_rounds < 1 {
        return Err(Error::NotApplicable("no Phase-I rounds".into()));
    }
    if phase1_counts.len() != k || table.k() != k {
        return Err(Error::InvalidParameter("counts and table must cover every arm".into()));
    }
    let ln_t = (horizon as f64).ln();
    let min_samples = phase1_rounds as f64 / (2 * k) as f64;
    let s_min = (min_samples.floor() as usize).max(1);
    let scale = ncb_scale(k, horizon);
    let (high, low) = split_arms(instance, 6.0 * scale);

    let g1 = SubEvent {
        holds: phase1_counts.iter().all(|&n| n as f64 >= min_samples),
        applicable: true,
    };
    let g2 = if high.is_empty() {
        SubEvent::vacuous()
    } else {
        let holds = high.iter().all(|&i| {
            let mu = instance.arm(i).mean;
            prefix_means_all(table.row(i), s_min, |s, m| {
                (mu - m).abs() <= 3.0 * (mu * ln_t / s as f64).sqrt()
            })
        });
        SubEvent { holds, applicable: true }
    };
    let g3 = if low.is_empty() {
        SubEvent::vacuous()
    } else {
        let bound = 9.0 * scale;
        let holds = low
            .iter()
            .all(|&j| prefix_means_all(table.row(j), s_min, |_, m| m <= bound));
        SubEvent { holds, applicable: true }
    };
    Ok(EventCheck { parts: [g1, g2, g3] })
}

/// `S = c² ln T / μ*`.
pub fn s_value(instance: &BanditInstance, horizon: u64, c: f64) -> Result<f64> {
    let mu = instance.optimal_mean();
    if mu <= 0.0 {
        return Err(Error::NotApplicable("S is undefined when μ* = 0".into()));
    }
    Ok(c * c * (horizon as f64).ln() / mu)
}

/// Evaluates E₁ on a uniform-sampling sequence and E₂, E₃ on the table.
pub fn check_e(
    table: &RewardTable,
    instance: &BanditInstance,
    horizon: u64,
    c: f64,
    uniform_pulls: &[usize],
) -> Result<EventCheck> {
    let k = instance.k();
    let s = s_value(instance, horizon, c)?;
    let mu_star = instance.optimal_mean();
    let ln_t = (horizon as f64).ln();

    let r_min = (128.0 * k as f64 * s).ceil() as usize;
    let e1 = if uniform_pulls.len() < r_min.max(1) {
        SubEvent::vacuous()
    } else {
        let mut counts = vec![0u64; k];
        let mut holds = true;
        for (idx, &arm) in uniform_pulls.iter().enumerate() {
            counts[arm] += 1;
            let r = idx + 1;
            if r >= r_min {
                let lo = r as f64 / (2 * k) as f64;
                let hi = 3.0 * r as f64 / (2 * k) as f64;
                if counts.iter().any(|&n| (n as f64) < lo || n as f64 > hi) {
                    holds = false;
                    break;
                }
            }
        }
        SubEvent { holds, applicable: true }
    };

    let s_min = ((64.0 * s).floor() as usize).max(1);
    // arms exactly at μ*/64 fall on the small-mean side
    let (high, low) = split_arms(instance, mu_star / 64.0);
    let e2 = if high.is_empty() {
        SubEvent::vacuous()
    } else {
        let holds = high.iter().all(|&i| {
            let mu = instance.arm(i).mean;
            prefix_means_all(table.row(i), s_min, |s, m| {
                (mu - m).abs() <= c * (mu * ln_t / s as f64).sqrt()
            })
        });
        SubEvent { holds, applicable: true }
    };
    let e3 = if low.is_empty() {
        SubEvent::vacuous()
    } else {
        let bound = mu_star / 32.0;
        let holds = low
            .iter()
            .all(|&j| prefix_means_all(table.row(j), s_min, |_, m| m < bound));
        SubEvent { holds, applicable: true }
    };
    Ok(EventCheck { parts: [e1, e2, e3] })
}

/// The first `len` uniform draws of the policy stream for `seed`: exactly the
/// exploration picks NCB, Modified NCB and the uniform baseline make.
pub fn uniform_arm_sequence(seed: u64, k: usize, len: usize) -> Vec<usize> {
    let mut rng = rng::policy_stream(seed);
    (0..len).map(|_| rng.random_range(0..k)).collect()
}

pub fn counts_of(arms: &[usize], k: usize) -> Vec<u64> {
    let mut counts = vec![0u64; k];
    arms.iter().for_each(|&a| counts[a] += 1);
    counts
}

/// Failure statistics of one event over many replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventReport {
    pub event: String,
    #[serde(skip)]
    pub holds: Vec<bool>,
    pub replications: usize,
    pub failures: usize,
    pub failure_rate: f64,
    /// The lemma's lower bound on the event probability is `1 − bound`.
    pub bound: f64,
    pub applicable: bool,
}

impl EventReport {
    fn new(event: String, holds: Vec<bool>, bound: f64, applicable: bool) -> Self {
        let failures = holds.iter().filter(|h| !**h).count();
        EventReport {
            event,
            replications: holds.len(),
            failures,
            failure_rate: if holds.is_empty() { 0.0 } else { failures as f64 / holds.len() as f64 },
            holds,
            bound,
            applicable,
        }
    }

    /// Per-sub-event reports plus the conjunction, named `{prefix}1..3` and `prefix`.
    pub fn aggregate(prefix: &str, checks: &[EventCheck], bound: f64) -> Vec<EventReport> {
        let mut out: Vec<EventReport> = (0..3)
            .map(|j| {
                EventReport::new(
                    format!("{prefix}{}", j + 1),
                    checks.iter().map(|c| c.parts[j].holds).collect(),
                    bound,
                    checks.iter().any(|c| c.parts[j].applicable),
                )
            })
            .collect();
        let any_applicable = out.iter().any(|r| r.applicable);
        out.push(EventReport::new(
            prefix.to_owned(),
            checks.iter().map(EventCheck::holds).collect(),
            bound,
            any_applicable,
        ));
        out
    }
}

/// Measured exploration length against the bracket `[128kS, 968kS]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauReport {
    pub tau: u64,
    pub lower: f64,
    pub upper: f64,
    pub s_value: f64,
    pub threshold: f64,
    /// The threshold was never exceeded within the allowed rounds.
    pub truncated: bool,
}

impl TauReport {
    pub fn in_bracket(&self) -> bool {
        self.lower <= self.tau as f64 && self.tau as f64 <= self.upper
    }
}

/// Uniform sampling until some reward sum exceeds `420 c² ln W`, for at most `W` rounds.
pub fn measure_tau(instance: &BanditInstance, window: u64, horizon: u64, c: f64, seed: u64) -> Result<TauReport> {
    let threshold = ModifiedNcbConfig::new(instance.k(), window, c)?.stop_threshold;
    measure_tau_with_threshold(instance, threshold, window, horizon, c, seed)
}

/// [`measure_tau`] with an explicit stopping threshold and round cap.
pub fn measure_tau_with_threshold(
    instance: &BanditInstance,
    threshold: f64,
    max_rounds: u64,
    horizon: u64,
    c: f64,
    seed: u64,
) -> Result<TauReport> {
    let k = instance.k();
    let s = s_value(instance, horizon, c)?;
    let mut picks = rng::policy_stream(seed);
    let mut table = LazyTable::new(instance, max_rounds.max(1), seed)?;
    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0f64; k];
    let mut tau = 0;
    let mut crossed = false;
    while tau < max_rounds {
        let arm = picks.random_range(0..k);
        sums[arm] += table.entry(arm, counts[arm]);
        counts[arm] += 1;
        tau += 1;
        if sums[arm] > threshold {
            crossed = true;
            break;
        }
    }
    Ok(TauReport {
        tau,
        lower: 128.0 * k as f64 * s,
        upper: 968.0 * k as f64 * s,
        s_value: s,
        threshold,
        truncated: !crossed,
    })
}

/// Whether `(1−x)^a ≥ 1 − 2ax` holds (with slack `1e-12`) for `x ∈ [0, ½]`, `a ∈ [0, 1]`.
pub fn claim1_oracle(x: f64, a: f64) -> Result<bool> {
    if !(0.0..=0.5).contains(&x) || !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "need x in [0, 1/2] and a in [0, 1], got x = {x}, a = {a}"
        )));
    }
    Ok((1.0 - x).powf(a) >= 1.0 - 2.0 * a * x - 1e-12)
}

/// Number of exploitation-stage pulls of arms with `μ_j ≤ 6 sqrt(k ln k ln T / T)`.
pub fn phase_two_small_arm_pulls(traj: &Trajectory, instance: &BanditInstance) -> usize {
    let bound = 6.0 * ncb_scale(instance.k(), traj.horizon);
    traj.pulls
        .iter()
        .filter(|p| p.phase.stage == Stage::Exploit && instance.arm(p.arm).mean <= bound)
        .count()
}

/// Whether `μ* ≥ 32 sqrt(k ln k ln T / T)` and the NCB prefix is shorter than `T`.
pub fn small_arm_lemma_applies(instance: &BanditInstance, horizon: u64) -> Result<bool> {
    Ok(phase1_length(instance.k(), horizon)? < horizon
        && instance.optimal_mean() >= 32.0 * ncb_scale(instance.k(), horizon))
}

/// Diagnostics over many replications of one instance and horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub horizon: u64,
    pub replications: usize,
    pub phase1_rounds: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub g_events: Vec<EventReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub e_events: Vec<EventReport>,
    pub tau: Vec<TauReport>,
    pub tau_in_bracket_or_truncated: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// One replication's diagnostics, seeded by `seed`.
pub fn diagnose_replication(
    instance: &BanditInstance,
    horizon: u64,
    c: f64,
    seed: u64,
) -> Result<(Option<EventCheck>, Option<EventCheck>, Option<TauReport>)> {
    let k = instance.k();
    let table = RewardTable::build(instance, horizon, seed)?;
    let phase1 = phase1_length(k, horizon)?;
    let g = if phase1 >= 1 {
        let pulls = uniform_arm_sequence(seed, k, phase1 as usize);
        Some(check_g(&table, instance, horizon, phase1, &counts_of(&pulls, k))?)
    } else {
        None
    };
    let (e, tau) = if instance.optimal_mean() > 0.0 {
        let pulls = uniform_arm_sequence(seed, k, horizon as usize);
        (
            Some(check_e(&table, instance, horizon, c, &pulls)?),
            Some(measure_tau(instance, horizon, horizon, c, seed)?),
        )
    } else {
        (None, None)
    };
    Ok((g, e, tau))
}

/// Aggregates per-replication diagnostics in replication order.
pub fn summarize_diagnostics(
    instance: &BanditInstance,
    horizon: u64,
    results: Vec<(Option<EventCheck>, Option<EventCheck>, Option<TauReport>)>,
) -> Result<DiagnosticsReport> {
    let bound = 4.0 / horizon as f64;
    let replications = results.len();
    let mut gs = Vec::new();
    let mut es = Vec::new();
    let mut taus = Vec::new();
    for (g, e, t) in results {
        gs.extend(g);
        es.extend(e);
        taus.extend(t);
    }
    let mut notes = Vec::new();
    if gs.is_empty() {
        notes.push("G events not applicable: no Phase-I rounds (k = 1)".to_owned());
    }
    if es.is_empty() {
        notes.push("E events not applicable: optimal mean is 0".to_owned());
    }
    let tau_ok = taus.iter().filter(|t| t.truncated || t.in_bracket()).count();
    Ok(DiagnosticsReport {
        horizon,
        replications,
        phase1_rounds: phase1_length(instance.k(), horizon)?,
        g_events: if gs.is_empty() { Vec::new() } else { EventReport::aggregate("G", &gs, bound) },
        e_events: if es.is_empty() { Vec::new() } else { EventReport::aggregate("E", &es, bound) },
        tau: taus,
        tau_in_bracket_or_truncated: tau_ok,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ArmSpec;

    fn inst(arms: Vec<ArmSpec>) -> BanditInstance {
        BanditInstance::new(arms).unwrap()
    }

    #[test]
    fn point_masses_satisfy_concentration() {
        let i = inst(vec![ArmSpec::point_mass(0.9).unwrap(), ArmSpec::point_mass(0.0).unwrap()]);
        let t = 10_000;
        let table = RewardTable::build(&i, t, 1).unwrap();
        let p1 = phase1_length(2, t).unwrap();
        let g = check_g(&table, &i, t, p1, &[p1 / 2, p1 - p1 / 2]).unwrap();
        assert!(g.parts[1].holds && g.parts[2].holds);
        let e = check_e(&table, &i, t, 3.0, &[]).unwrap();
        assert!(e.parts[1].holds && e.parts[1].applicable);
        assert!(!e.parts[0].applicable);
    }

    #[test]
    fn zeroed_high_mean_row_breaks_g2() {
        let i = inst(vec![ArmSpec::bernoulli(0.9).unwrap(), ArmSpec::bernoulli(0.2).unwrap()]);
        let t = 10_000;
        let mut table = RewardTable::build(&i, t, 2).unwrap();
        table.rows_mut()[0].iter_mut().for_each(|x| *x = 0.0);
        let p1 = phase1_length(2, t).unwrap();
        let g = check_g(&table, &i, t, p1, &[p1 / 2, p1 - p1 / 2]).unwrap();
        assert!(!g.parts[1].holds);
        assert!(!g.holds());
    }

    #[test]
    fn g_needs_phase_one() {
        let i = inst(vec![ArmSpec::bernoulli(0.9).unwrap()]);
        let table = RewardTable::build(&i, 10, 2).unwrap();
        assert!(matches!(check_g(&table, &i, 10, 0, &[0]), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn g1_counts_threshold() {
        let i = inst(vec![ArmSpec::point_mass(0.5).unwrap(), ArmSpec::point_mass(0.5).unwrap()]);
        let table = RewardTable::build(&i, 100, 2).unwrap();
        // T̃ = 40, k = 2: each arm needs at least 10
        assert!(check_g(&table, &i, 100, 40, &[10, 30]).unwrap().parts[0].holds);
        assert!(!check_g(&table, &i, 100, 40, &[9, 31]).unwrap().parts[0].holds);
    }

    #[test]
    fn e_boundary_arm_goes_to_small_side() {
        let i = inst(vec![ArmSpec::point_mass(1.0).unwrap(), ArmSpec::point_mass(1.0 / 64.0).unwrap()]);
        let table = RewardTable::build(&i, 1000, 1).unwrap();
        let e = check_e(&table, &i, 1000, 3.0, &[]).unwrap();
        // E₃ applies to arm 1: μ̂ = 1/64 < 1/32
        assert!(e.parts[2].applicable && e.parts[2].holds);
    }

    #[test]
    fn e_needs_positive_optimum() {
        let i = inst(vec![ArmSpec::point_mass(0.0).unwrap()]);
        let table = RewardTable::build(&i, 10, 1).unwrap();
        assert!(matches!(check_e(&table, &i, 10, 3.0, &[]), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn tau_point_mass_exact() {
        let i = inst(vec![ArmSpec::point_mass(1.0).unwrap()]);
        // 420 · 9 · ln(e¹⁰) = 37800
        let r = measure_tau_with_threshold(&i, 37_800.0, 100_000, 100_000, 3.0, 0).unwrap();
        assert_eq!(r.tau, 37_801);
        assert!(!r.truncated);
    }

    #[test]
    fn tau_truncates_on_short_window() {
        let i = inst(vec![ArmSpec::bernoulli(0.5).unwrap(), ArmSpec::bernoulli(0.5).unwrap()]);
        let r = measure_tau(&i, 1000, 1000, 3.0, 3).unwrap();
        assert!(r.truncated);
        assert_eq!(r.tau, 1000);
    }

    #[test]
    fn claim1_boundaries_and_range() {
        assert!(claim1_oracle(0.0, 0.7).unwrap());
        assert!(claim1_oracle(0.5, 1.0).unwrap());
        assert!(claim1_oracle(0.6, 0.5).is_err());
        assert!(claim1_oracle(0.1, 1.1).is_err());
    }

    #[test]
    fn checks_are_pure() {
        let i = inst(vec![ArmSpec::bernoulli(0.9).unwrap(), ArmSpec::bernoulli(0.2).unwrap()]);
        let a = diagnose_replication(&i, 5000, 3.0, 17).unwrap();
        let b = diagnose_replication(&i, 5000, 3.0, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn aggregate_names_and_rates() {
        let ok = SubEvent { holds: true, applicable: true };
        let bad = SubEvent { holds: false, applicable: true };
        let checks = [
            EventCheck { parts: [ok, ok, SubEvent::vacuous()] },
            EventCheck { parts: [ok, bad, SubEvent::vacuous()] },
        ];
        let rep = EventReport::aggregate("G", &checks, 0.01);
        let names: Vec<_> = rep.iter().map(|r| r.event.as_str()).collect();
        assert_eq!(names, ["G1", "G2", "G3", "G"]);
        assert_eq!(rep[1].failure_rate, 0.5);
        assert!(!rep[2].applicable);
        assert_eq!(rep[3].failures, 1);
    }
}
