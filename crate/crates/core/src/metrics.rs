//! Nash regret, average regret, the realized/true-mean variants, and p-mean
//! welfare, estimated from Monte Carlo ensembles.
//!
//! Everything multiplicative is computed in the log domain. Arms carry their
//! exact log-mean, so instances with means below `f64::MIN_POSITIVE` still
//! yield finite log-welfare.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::runner::{Pull, Trajectory};

/// `ln Σ exp(x_i)`, ignoring `-∞` terms; `-∞` for an empty or all-`-∞` input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

fn mean_and_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let se = if xs.len() < 2 {
        0.0
    } else {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    Estimate { value: mean, se }
}

/// Compact record of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    /// Arm pulled each round.
    pub arms: Vec<u16>,
    /// `(1/T) Σ ln X_t`; `-∞` if any realized reward is 0.
    pub ln_gm_realized: f64,
    /// `(1/T) Σ ln μ_{I_t}`.
    pub ln_gm_true: f64,
    /// `(1/T) Σ μ_{I_t}`.
    pub mean_true: f64,
}

/// Incremental builder so long runs never materialize a full trajectory.
pub struct SummaryBuilder<'a> {
    ln_means: &'a [f64],
    means: &'a [f64],
    arms: Vec<u16>,
    sum_ln_x: f64,
    sum_ln_mu: f64,
    sum_mu: f64,
}

impl<'a> SummaryBuilder<'a> {
    pub fn new(ensemble: &'a Ensemble) -> Self {
        SummaryBuilder {
            ln_means: &ensemble.ln_means,
            means: &ensemble.means,
            arms: Vec::with_capacity(ensemble.horizon as usize),
            sum_ln_x: 0.0,
            sum_ln_mu: 0.0,
            sum_mu: 0.0,
        }
    }

    pub fn observe(&mut self, pull: &Pull) {
        self.arms.push(pull.arm as u16);
        self.sum_ln_x += pull.reward.ln();
        self.sum_ln_mu += self.ln_means[pull.arm];
        self.sum_mu += self.means[pull.arm];
    }

    pub fn finish(self) -> ReplicationSummary {
        let t = self.arms.len() as f64;
        ReplicationSummary {
            ln_gm_realized: self.sum_ln_x / t,
            ln_gm_true: self.sum_ln_mu / t,
            mean_true: self.sum_mu / t,
            arms: self.arms,
        }
    }
}

/// Replications of one (policy, instance, horizon) cell.
#[derive(Debug, Clone)]
pub struct Ensemble {
    means: Vec<f64>,
    ln_means: Vec<f64>,
    optimal_mean: f64,
    horizon: u64,
    reps: Vec<ReplicationSummary>,
}

impl Ensemble {
    pub fn new(instance: &BanditInstance, horizon: u64) -> Result<Self> {
        if instance.k() > usize::from(u16::MAX) + 1 {
            return Err(Error::InvalidInstance("ensembles support at most 65536 arms".into()));
        }
        Ok(Ensemble {
            means: instance.means(),
            ln_means: instance.ln_means(),
            optimal_mean: instance.optimal_mean(),
            horizon,
            reps: Vec::new(),
        })
    }

    pub fn from_trajectories(instance: &BanditInstance, trajectories: &[Trajectory]) -> Result<Self> {
        let first = trajectories
            .first()
            .ok_or_else(|| Error::EnsembleMismatch("empty ensemble".into()))?;
        let mut e = Ensemble::new(instance, first.horizon)?;
        for t in trajectories {
            e.push_trajectory(t)?;
        }
        Ok(e)
    }

    pub fn push_trajectory(&mut self, traj: &Trajectory) -> Result<()> {
        if traj.horizon != self.horizon || traj.pulls.len() as u64 != self.horizon {
            return Err(Error::EnsembleMismatch(format!(
                "trajectory has horizon {} ({} pulls), ensemble expects {}",
                traj.horizon,
                traj.pulls.len(),
                self.horizon
            )));
        }
        let mut b = SummaryBuilder::new(self);
        traj.pulls.iter().for_each(|p| b.observe(p));
        let s = b.finish();
        self.reps.push(s);
        Ok(())
    }

    pub fn push(&mut self, summary: ReplicationSummary) -> Result<()> {
        if summary.arms.len() as u64 != self.horizon {
            return Err(Error::EnsembleMismatch(format!(
                "replication has {} rounds, ensemble expects {}",
                summary.arms.len(),
                self.horizon
            )));
        }
        self.reps.push(summary);
        Ok(())
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn replications(&self) -> usize {
        self.reps.len()
    }

    pub fn optimal_mean(&self) -> f64 {
        self.optimal_mean
    }

    pub fn summaries(&self) -> &[ReplicationSummary] {
        &self.reps
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.reps.is_empty() {
            Err(Error::EnsembleMismatch("empty ensemble".into()))
        } else {
            Ok(())
        }
    }
}

/// Per-round Monte Carlo estimates of `E[μ_{I_t}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerRoundMeans {
    /// `ln E[μ_{I_t}]` estimates; `-∞` where the estimate is exactly 0.
    pub ln_values: Vec<f64>,
    pub values: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub replications: usize,
}

impl PerRoundMeans {
    /// Direct construction from linear values (no standard errors).
    pub fn from_values(values: Vec<f64>) -> Self {
        PerRoundMeans {
            ln_values: values.iter().map(|v| v.ln()).collect(),
            standard_errors: vec![0.0; values.len()],
            values,
            replications: 1,
        }
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// Whether some round has zero estimated welfare, collapsing the geometric mean.
    pub fn welfare_is_zero(&self) -> bool {
        self.ln_values.contains(&f64::NEG_INFINITY)
    }

    /// `ln` of the geometric mean of the per-round values.
    pub fn ln_geometric_mean(&self) -> f64 {
        if self.welfare_is_zero() {
            return f64::NEG_INFINITY;
        }
        self.ln_values.iter().sum::<f64>() / self.ln_values.len() as f64
    }
}

pub fn per_round_means(ensemble: &Ensemble) -> Result<PerRoundMeans> {
    ensemble.require_nonempty()?;
    let k = ensemble.means.len();
    let horizon = ensemble.horizon as usize;
    let r = ensemble.reps.len();
    let mut counts = vec![0u32; horizon * k];
    for rep in &ensemble.reps {
        for (t, &arm) in rep.arms.iter().enumerate() {
            counts[t * k + arm as usize] += 1;
        }
    }
    let ln_r = (r as f64).ln();
    let mut ln_values = Vec::with_capacity(horizon);
    let mut values = Vec::with_capacity(horizon);
    let mut standard_errors = Vec::with_capacity(horizon);
    for row in counts.chunks_exact(k) {
        let terms = row
            .iter()
            .zip(&ensemble.ln_means)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &l)| (c as f64).ln() + l);
        let ln_v = log_sum_exp(terms) - ln_r;
        let v = ln_v.exp();
        let se = if r < 2 {
            0.0
        } else {
            let sq: f64 = row.iter().zip(&ensemble.means).map(|(&c, &m)| c as f64 * m * m).sum();
            let var = ((sq - r as f64 * v * v) / (r as f64 - 1.0)).max(0.0);
            (var / r as f64).sqrt()
        };
        ln_values.push(ln_v);
        values.push(v);
        standard_errors.push(se);
    }
    Ok(PerRoundMeans {
        ln_values,
        values,
        standard_errors,
        replications: r,
    })
}

/// `μ* − (Π E[μ_{I_t}])^{1/T}`; exactly `μ*` when the welfare collapses to 0.
pub fn nash_regret(per_round: &PerRoundMeans, optimal_mean: f64) -> f64 {
    optimal_mean - per_round.ln_geometric_mean().exp()
}

/// `μ* − (1/T) Σ E[μ_{I_t}]`.
pub fn average_regret(per_round: &PerRoundMeans, optimal_mean: f64) -> f64 {
    optimal_mean - per_round.values.iter().sum::<f64>() / per_round.values.len() as f64
}

/// Delta-method standard error of the Nash regret estimate.
///
/// Linearizing the geometric mean around the per-round estimates gives each
/// replication the influence `GM/T · Σ_t μ_{I_t}/v_t`.
pub fn nash_regret_se(ensemble: &Ensemble, per_round: &PerRoundMeans) -> f64 {
    let r = ensemble.reps.len();
    if r < 2 || per_round.welfare_is_zero() {
        return 0.0;
    }
    let ln_gm = per_round.ln_geometric_mean();
    let t = per_round.horizon() as f64;
    let influence: Vec<f64> = ensemble
        .reps
        .iter()
        .map(|rep| {
            let s: f64 = rep
                .arms
                .iter()
                .zip(&per_round.ln_values)
                .map(|(&a, &ln_v)| (ensemble.ln_means[a as usize] - ln_v).exp())
                .sum();
            (ln_gm - t.ln()).exp() * s
        })
        .collect();
    mean_and_se(&influence).se
}

/// `μ* − E[(Π X_t)^{1/T}]` over realized rewards.
pub fn nr0_estimate(ensemble: &Ensemble) -> Result<Estimate> {
    ensemble.require_nonempty()?;
    let gms: Vec<f64> = ensemble.reps.iter().map(|r| r.ln_gm_realized.exp()).collect();
    let e = mean_and_se(&gms);
    Ok(Estimate {
        value: ensemble.optimal_mean - e.value,
        se: e.se,
    })
}

/// `μ* − E[(Π μ_{I_t})^{1/T}]` over the true means of pulled arms.
pub fn nr1_estimate(ensemble: &Ensemble) -> Result<Estimate> {
    ensemble.require_nonempty()?;
    let gms: Vec<f64> = ensemble.reps.iter().map(|r| r.ln_gm_true.exp()).collect();
    let e = mean_and_se(&gms);
    Ok(Estimate {
        value: ensemble.optimal_mean - e.value,
        se: e.se,
    })
}

/// Power mean of positive values given by their logs:
/// `((1/n) Σ v^p)^{1/p}`, with `p = 0` the geometric mean.
pub fn power_mean_ln(ln_values: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p > 1.0 {
        return Err(Error::InvalidParameter(format!("p-mean needs p <= 1, got {p}")));
    }
    if p == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter("p = -inf is not supported; use the minimum".into()));
    }
    if ln_values.is_empty() {
        return Err(Error::InvalidParameter("p-mean of an empty sequence".into()));
    }
    let has_zero = ln_values.contains(&f64::NEG_INFINITY);
    let n = ln_values.len() as f64;
    if p == 0.0 || (p < 0.0 && has_zero) {
        if has_zero {
            return Ok(0.0);
        }
        return Ok((ln_values.iter().sum::<f64>() / n).exp());
    }
    let lse = log_sum_exp(ln_values.iter().map(|&l| p * l));
    Ok(((lse - n.ln()) / p).exp())
}

pub fn p_mean_welfare(per_round: &PerRoundMeans, p: f64) -> Result<f64> {
    power_mean_ln(&per_round.ln_values, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PMean {
    pub p: f64,
    pub welfare: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretReport {
    pub horizon: u64,
    pub replications: usize,
    pub optimal_mean: f64,
    pub nash_regret: f64,
    pub nash_regret_se: f64,
    pub average_regret: f64,
    pub average_regret_se: f64,
    pub nr0: f64,
    pub nr0_se: f64,
    pub nr1: f64,
    pub nr1_se: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub p_mean_welfare: Vec<PMean>,
    pub welfare_is_zero: bool,
}

impl RegretReport {
    pub fn from_ensemble(ensemble: &Ensemble, p_values: &[f64]) -> Result<Self> {
        let per_round = per_round_means(ensemble)?;
        let mu = ensemble.optimal_mean;
        let avg = mean_and_se(&ensemble.reps.iter().map(|r| r.mean_true).collect::<Vec<_>>());
        let nr0 = nr0_estimate(ensemble)?;
        let nr1 = nr1_estimate(ensemble)?;
        let p_mean_welfare = p_values
            .iter()
            .map(|&p| Ok(PMean { p, welfare: p_mean_welfare(&per_round, p)? }))
            .collect::<Result<_>>()?;
        Ok(RegretReport {
            horizon: ensemble.horizon,
            replications: ensemble.reps.len(),
            optimal_mean: mu,
            nash_regret: nash_regret(&per_round, mu),
            nash_regret_se: nash_regret_se(ensemble, &per_round),
            average_regret: average_regret(&per_round, mu),
            average_regret_se: avg.se,
            nr0: nr0.value,
            nr0_se: nr0.se,
            nr1: nr1.value,
            nr1_se: nr1.se,
            p_mean_welfare,
            welfare_is_zero: per_round.welfare_is_zero(),
        })
    }

    /// Average regret does not exceed Nash regret (AM ≥ GM).
    pub fn satisfies_am_gm(&self, tol: f64) -> bool {
        self.welfare_is_zero || self.average_regret <= self.nash_regret + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ArmSpec;
    use crate::policies::{Phase, Stage};

    fn traj(arms: &[usize], rewards: &[f64]) -> Trajectory {
        Trajectory {
            policy: "fixed".into(),
            horizon: arms.len() as u64,
            pulls: arms
                .iter()
                .zip(rewards)
                .enumerate()
                .map(|(t, (&arm, &reward))| Pull {
                    round: t as u64 + 1,
                    arm,
                    reward,
                    phase: Phase::new(1, Stage::Explore),
                })
                .collect(),
        }
    }

    fn point_masses(values: &[f64]) -> BanditInstance {
        BanditInstance::new(values.iter().map(|&v| ArmSpec::point_mass(v).unwrap()).collect()).unwrap()
    }

    #[test]
    fn nash_regret_examples() {
        assert!(nash_regret(&PerRoundMeans::from_values(vec![0.9; 4]), 0.9).abs() < 1e-15);
        let pr = PerRoundMeans::from_values(vec![0.9, 0.4]);
        assert!((nash_regret(&pr, 0.9) - 0.3).abs() < 1e-15);
        assert!((average_regret(&pr, 0.9) - 0.25).abs() < 1e-15);
        let zero = PerRoundMeans::from_values(vec![0.9, 0.0, 0.5]);
        assert!(zero.welfare_is_zero());
        assert_eq!(nash_regret(&zero, 0.9), 0.9);
    }

    #[test]
    fn p_mean_examples() {
        let pr = PerRoundMeans::from_values(vec![0.9, 0.4]);
        assert!((p_mean_welfare(&pr, 1.0).unwrap() - 0.65).abs() < 1e-15);
        assert!((p_mean_welfare(&pr, 0.0).unwrap() - 0.6).abs() < 1e-15);
        assert!((p_mean_welfare(&pr, -1.0).unwrap() - 0.553_846_153_846_153_8).abs() < 1e-15);
        assert!(matches!(p_mean_welfare(&pr, 1.5), Err(Error::InvalidParameter(_))));
        assert!(p_mean_welfare(&pr, f64::NEG_INFINITY).is_err());
        let zero = PerRoundMeans::from_values(vec![0.5, 0.0]);
        assert_eq!(p_mean_welfare(&zero, -2.0).unwrap(), 0.0);
        assert!((p_mean_welfare(&zero, 1.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_optimal_policy_has_zero_regret() {
        let inst = point_masses(&[0.7, 0.2]);
        let trajs: Vec<_> = (0..3).map(|_| traj(&[0, 0, 0], &[0.7, 0.7, 0.7])).collect();
        let e = Ensemble::from_trajectories(&inst, &trajs).unwrap();
        let pr = per_round_means(&e).unwrap();
        assert!(pr.values.iter().all(|&v| (v - 0.7).abs() < 1e-15));
        let rep = RegretReport::from_ensemble(&e, &[]).unwrap();
        assert!(rep.nash_regret.abs() < 1e-15);
        assert!(rep.nr0.abs() < 1e-15);
        assert!(rep.nr1.abs() < 1e-15);
    }

    #[test]
    fn single_replication_is_exact() {
        let inst = point_masses(&[1.0, 0.25]);
        let e = Ensemble::from_trajectories(&inst, &[traj(&[0, 1, 1], &[1.0, 0.25, 0.25])]).unwrap();
        let pr = per_round_means(&e).unwrap();
        assert_eq!(pr.values, vec![1.0, 0.25, 0.25]);
        assert_eq!(pr.standard_errors, vec![0.0; 3]);
    }

    #[test]
    fn nr1_exhaustive_two_rounds() {
        // uniform policy over point masses (1, 0.5), T = 2: all 4 paths equally likely
        let inst = point_masses(&[1.0, 0.5]);
        let paths = [[0, 0], [0, 1], [1, 0], [1, 1]];
        let trajs: Vec<_> = paths
            .iter()
            .map(|p| traj(p, &p.map(|a| if a == 0 { 1.0 } else { 0.5 })))
            .collect();
        let e = Ensemble::from_trajectories(&inst, &trajs).unwrap();
        let nr1 = nr1_estimate(&e).unwrap().value;
        let expected = 1.0 - (1.0 + 0.5f64.sqrt() + 0.5f64.sqrt() + 0.5) / 4.0;
        assert!((nr1 - expected).abs() < 1e-15);
        assert!((expected - 0.271_446_609_406_726_2).abs() < 1e-15);
        // with point masses X_t = μ_{I_t}, so NR⁽⁰⁾ = NR⁽¹⁾
        assert!((nr0_estimate(&e).unwrap().value - nr1).abs() < 1e-15);
        // NR from per-round means 0.75, 0.75
        let pr = per_round_means(&e).unwrap();
        assert!((nash_regret(&pr, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_reward_collapses_realized_gm() {
        let inst = BanditInstance::new(vec![ArmSpec::bernoulli(0.5).unwrap()]).unwrap();
        let e = Ensemble::from_trajectories(&inst, &[traj(&[0, 0], &[1.0, 0.0])]).unwrap();
        assert_eq!(nr0_estimate(&e).unwrap().value, 0.5);
    }

    #[test]
    fn mismatched_horizons_rejected() {
        let inst = point_masses(&[1.0]);
        let err = Ensemble::from_trajectories(&inst, &[traj(&[0, 0], &[1.0, 1.0]), traj(&[0], &[1.0])]);
        assert!(matches!(err, Err(Error::EnsembleMismatch(_))));
        assert!(matches!(Ensemble::from_trajectories(&inst, &[]), Err(Error::EnsembleMismatch(_))));
    }

    #[test]
    fn tiny_log_means_survive() {
        // means far below f64::MIN_POSITIVE still give finite log-welfare
        let ln_small = -20_000.0;
        let inst = BanditInstance::new(vec![
            ArmSpec::bernoulli_from_ln(ln_small).unwrap(),
            ArmSpec::point_mass(1.0).unwrap(),
        ])
        .unwrap();
        let e = Ensemble::from_trajectories(&inst, &[traj(&[0, 1, 1, 1], &[0.0, 1.0, 1.0, 1.0])]).unwrap();
        let pr = per_round_means(&e).unwrap();
        assert!(!pr.welfare_is_zero());
        assert!((pr.ln_geometric_mean() - ln_small / 4.0).abs() < 1e-9);
        assert_eq!(nash_regret(&pr, 1.0), 1.0);
    }

    #[test]
    fn log_sum_exp_basics() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp([0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp([-1000.0, -1000.0]) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
