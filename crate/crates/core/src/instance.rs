//! Arm distributions and bandit instances.

use rand::Rng;
use rand_distr::Distribution as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reward distribution of one arm. All supports lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Bernoulli { p: f64 },
    Beta { alpha: f64, beta: f64 },
    PointMass { value: f64 },
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => p,
            Distribution::Beta { alpha, beta } => alpha / (alpha + beta),
            Distribution::PointMass { value } => value,
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidInstance(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        match *self {
            Distribution::Bernoulli { p } => unit("bernoulli p", p),
            Distribution::PointMass { value } => unit("point mass value", value),
            Distribution::Beta { alpha, beta } => {
                if alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidInstance(format!(
                        "beta parameters must be positive and finite, got ({alpha}, {beta})"
                    )))
                }
            }
        }
    }
}

/// One arm: its distribution, mean, and the natural log of the mean.
///
/// The log-mean is carried separately because some instances have means far
/// below `f64::MIN_POSITIVE`; welfare metrics read `ln_mean`, sampling reads
/// `mean`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub distribution: Distribution,
    pub mean: f64,
    pub ln_mean: f64,
    /// `mean` was clamped up to `f64::MIN_POSITIVE` because the exact value underflows.
    #[serde(default)]
    pub mean_clamped: bool,
}

impl ArmSpec {
    pub fn new(distribution: Distribution) -> Result<Self> {
        distribution.validate()?;
        let mean = distribution.mean();
        Ok(ArmSpec {
            distribution,
            mean,
            ln_mean: mean.ln(),
            mean_clamped: false,
        })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(Distribution::Bernoulli { p })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Distribution::Beta { alpha, beta })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(Distribution::PointMass { value })
    }

    /// Bernoulli arm given by the log of its success probability.
    pub fn bernoulli_from_ln(ln_p: f64) -> Result<Self> {
        if ln_p.is_nan() || ln_p > 0.0 {
            return Err(Error::InvalidInstance(format!("ln p = {ln_p} must be <= 0")));
        }
        let exact = ln_p.exp();
        let mean_clamped = exact < f64::MIN_POSITIVE && ln_p.is_finite();
        let p = if mean_clamped { f64::MIN_POSITIVE } else { exact };
        Ok(ArmSpec {
            distribution: Distribution::Bernoulli { p },
            mean: p,
            ln_mean: ln_p,
            mean_clamped,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.distribution {
            Distribution::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            Distribution::PointMass { value } => value,
            Distribution::Beta { alpha, beta } => {
                // parameters were validated on construction
                let d = rand_distr::Beta::new(alpha, beta).expect("valid beta parameters");
                d.sample(rng).clamp(0.0, 1.0)
            }
        }
    }
}

/// A stochastic bandit instance: `k >= 1` arms with means in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditInstance {
    arms: Vec<ArmSpec>,
    optimal_mean: f64,
    optimal_arm: usize,
}

pub fn make_instance(arms: Vec<ArmSpec>) -> Result<BanditInstance> {
    BanditInstance::new(arms)
}

impl BanditInstance {
    pub fn new(arms: Vec<ArmSpec>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one arm".into()));
        }
        for (i, arm) in arms.iter().enumerate() {
            arm.distribution.validate()?;
            if !(0.0..=1.0).contains(&arm.mean) {
                return Err(Error::InvalidInstance(format!(
                    "arm {i} has mean {} outside [0, 1]",
                    arm.mean
                )));
            }
        }
        // Lowest index wins ties. Compare log-means so underflowed arms still order correctly.
        let mut optimal_arm = 0;
        for (i, arm) in arms.iter().enumerate().skip(1) {
            if arm.ln_mean > arms[optimal_arm].ln_mean {
                optimal_arm = i;
            }
        }
        Ok(BanditInstance {
            optimal_mean: arms[optimal_arm].mean,
            optimal_arm,
            arms,
        })
    }

    pub fn from_distributions(dists: &[Distribution]) -> Result<Self> {
        Self::new(dists.iter().map(|&d| ArmSpec::new(d)).collect::<Result<_>>()?)
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn arm(&self, i: usize) -> &ArmSpec {
        &self.arms[i]
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.mean).collect()
    }

    pub fn ln_means(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.ln_mean).collect()
    }

    /// `μ*`.
    pub fn optimal_mean(&self) -> f64 {
        self.optimal_mean
    }

    /// `i*` (0-based).
    pub fn optimal_arm(&self) -> usize {
        self.optimal_arm
    }

    pub fn any_mean_clamped(&self) -> bool {
        self.arms.iter().any(|a| a.mean_clamped)
    }
}

/// The two-arm instance on which UCB has Nash regret close to one: a
/// Bernoulli arm with mean `(2e)^-T` and a point mass at 1.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub instance: BanditInstance,
    /// Whether `T > 25 ln T` holds.
    pub precondition_met: bool,
    /// Whether arm 0's sampling probability had to be clamped.
    pub clamped: bool,
}

pub fn counterexample_instance(horizon: u64) -> Result<Counterexample> {
    if horizon < 1 {
        return Err(Error::InvalidHorizon(horizon, "must be positive"));
    }
    let t = horizon as f64;
    let ln_mu1 = -t * (2.0 * std::f64::consts::E).ln();
    let low = ArmSpec::bernoulli_from_ln(ln_mu1)?;
    let clamped = low.mean_clamped;
    let instance = BanditInstance::new(vec![low, ArmSpec::point_mass(1.0)?])?;
    Ok(Counterexample {
        instance,
        precondition_met: t > 25.0 * t.ln(),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arm() {
        let inst = make_instance(vec![ArmSpec::bernoulli(0.5).unwrap()]).unwrap();
        assert_eq!(inst.k(), 1);
        assert_eq!(inst.optimal_mean(), 0.5);
        assert_eq!(inst.optimal_arm(), 0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let inst = make_instance(vec![
            ArmSpec::bernoulli(0.3).unwrap(),
            ArmSpec::bernoulli(0.3).unwrap(),
        ])
        .unwrap();
        assert_eq!(inst.optimal_arm(), 0);
        assert_eq!(inst.optimal_mean(), 0.3);
    }

    #[test]
    fn point_mass_first_dominates_tiny_bernoulli() {
        let ln_p = -256.0 * (2.0 * std::f64::consts::E).ln();
        let inst = make_instance(vec![
            ArmSpec::point_mass(1.0).unwrap(),
            ArmSpec::bernoulli_from_ln(ln_p).unwrap(),
        ])
        .unwrap();
        assert_eq!(inst.optimal_mean(), 1.0);
        assert_eq!(inst.optimal_arm(), 0);
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert!(matches!(make_instance(vec![]), Err(Error::InvalidInstance(_))));
        assert!(matches!(ArmSpec::bernoulli(1.5), Err(Error::InvalidInstance(_))));
        assert!(matches!(ArmSpec::point_mass(-0.1), Err(Error::InvalidInstance(_))));
        assert!(matches!(ArmSpec::beta(0.0, 1.0), Err(Error::InvalidInstance(_))));
        let mut bad = ArmSpec::bernoulli(0.5).unwrap();
        bad.mean = 1.2;
        assert!(matches!(make_instance(vec![bad]), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn counterexample_at_256_is_representable() {
        let ce = counterexample_instance(256).unwrap();
        let low = ce.instance.arm(0);
        assert!(!ce.clamped);
        // log10((2e)^-256) = -188.24306625721165...
        let log10 = low.ln_mean / std::f64::consts::LN_10;
        assert!((log10 + 188.243_066_257_211_65).abs() < 1e-9, "{log10}");
        assert!((low.mean.ln() - low.ln_mean).abs() < 1e-9);
        assert_eq!(ce.instance.optimal_arm(), 1);
        assert_eq!(ce.instance.optimal_mean(), 1.0);
        assert!(ce.precondition_met);
    }

    #[test]
    fn counterexample_underflow_is_clamped() {
        let ce = counterexample_instance(16384).unwrap();
        assert!(ce.clamped);
        let low = ce.instance.arm(0);
        assert_eq!(low.mean, f64::MIN_POSITIVE);
        assert!((low.ln_mean + 16384.0 * (1.0 + 2f64.ln())).abs() < 1e-6);
        assert_eq!(ce.instance.optimal_arm(), 1);
    }

    #[test]
    fn counterexample_precondition_flag() {
        // 25 ln 100 ≈ 115 > 100
        assert!(!counterexample_instance(100).unwrap().precondition_met);
    }

    #[test]
    fn distribution_json_shape() {
        let d: Distribution = serde_json::from_str(r#"{"kind":"beta","alpha":2,"beta":3}"#).unwrap();
        assert_eq!(d, Distribution::Beta { alpha: 2.0, beta: 3.0 });
        assert!(serde_json::from_str::<Distribution>(r#"{"kind":"bernoulli","p":0.5,"q":1}"#).is_err());
    }
}
