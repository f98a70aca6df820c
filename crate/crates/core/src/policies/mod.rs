//! Bandit policies as step state machines.
//!
//! Each round the runner calls [`Policy::select`], reads the reward of the
//! chosen arm from the canonical table, and feeds it back via
//! [`Policy::update`]. Policies own their random stream.

mod anytime;
mod baseline;
mod modified;
mod ncb;
mod ucb;

pub use anytime::{Anytime, Branch, EpochRecord};
pub use baseline::{Constant, Uniform};
pub use modified::{modified_ncb_index, modified_ncb_phase1_done, ModifiedNcb, ModifiedNcbConfig};
pub use ncb::{ncb_index, phase1_length, Ncb, NcbConfig};
pub use ucb::{ucb_index, Ucb};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default confidence constant of Modified NCB.
pub const DEFAULT_C: f64 = 3.0;

/// Running per-arm statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ArmStats {
    pub count: u64,
    pub reward_sum: f64,
}

impl ArmStats {
    pub fn record(&mut self, reward: f64) {
        self.count += 1;
        self.reward_sum += reward;
    }

    /// `reward_sum / count`, or 0 for an unvisited arm.
    pub fn empirical_mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.reward_sum / self.count as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Uniform exploration.
    Explore,
    /// Index maximization (or any non-uniform rule).
    Exploit,
}

/// Phase marker attached to each pull. Single-run policies stay in epoch 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase {
    pub epoch: u32,
    pub stage: Stage,
}

impl Phase {
    pub const fn new(epoch: u32, stage: Stage) -> Self {
        Phase { epoch, stage }
    }
}

pub trait Policy {
    fn name(&self) -> &str;

    fn k(&self) -> usize;

    /// Arm (0-based) to pull at 1-based round `t`.
    fn select(&mut self, t: u64) -> usize;

    fn update(&mut self, arm: usize, reward: f64);

    /// Phase of the most recent selection.
    fn phase(&self) -> Phase;

    /// Statistics over every update received so far.
    fn stats(&self) -> &[ArmStats];
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map_or(0, |(i, _)| i)
}

/// Policy choice and parameters, as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", from = "RawSpec")]
pub enum PolicySpec {
    Ncb,
    ModifiedNcb {
        #[serde(default = "default_c")]
        c: f64,
        /// Window `W`; defaults to the horizon.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<u64>,
    },
    Anytime {
        #[serde(default = "default_c")]
        c: f64,
    },
    Ucb,
    Uniform,
    Constant {
        arm: usize,
    },
}

// Unit variants of an internally tagged enum silently accept extra keys, so
// deserialization goes through empty struct variants instead.
#[derive(Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
enum RawSpec {
    Ncb {},
    ModifiedNcb {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default)]
        window: Option<u64>,
    },
    Anytime {
        #[serde(default = "default_c")]
        c: f64,
    },
    Ucb {},
    Uniform {},
    Constant {
        arm: usize,
    },
}

impl From<RawSpec> for PolicySpec {
    fn from(raw: RawSpec) -> Self {
        match raw {
            RawSpec::Ncb {} => PolicySpec::Ncb,
            RawSpec::ModifiedNcb { c, window } => PolicySpec::ModifiedNcb { c, window },
            RawSpec::Anytime { c } => PolicySpec::Anytime { c },
            RawSpec::Ucb {} => PolicySpec::Ucb,
            RawSpec::Uniform {} => PolicySpec::Uniform,
            RawSpec::Constant { arm } => PolicySpec::Constant { arm },
        }
    }
}

fn default_c() -> f64 {
    DEFAULT_C
}

impl PolicySpec {
    /// Label used in reports and seed derivation.
    pub fn label(&self) -> String {
        match self {
            PolicySpec::Ncb => "ncb".into(),
            PolicySpec::ModifiedNcb { .. } => "modified_ncb".into(),
            PolicySpec::Anytime { .. } => "anytime".into(),
            PolicySpec::Ucb => "ucb".into(),
            PolicySpec::Uniform => "uniform".into(),
            PolicySpec::Constant { arm } => format!("constant:{arm}"),
        }
    }

    pub fn validate(&self, k: usize, horizon: u64) -> Result<()> {
        match *self {
            PolicySpec::Ncb | PolicySpec::Ucb if horizon < 2 => {
                Err(Error::InvalidHorizon(horizon, "index policies need T >= 2"))
            }
            PolicySpec::ModifiedNcb { c, window } => {
                check_c(c)?;
                match window {
                    Some(w) if w < horizon => Err(Error::Config(format!(
                        "modified_ncb window {w} is shorter than horizon {horizon}"
                    ))),
                    _ => Ok(()),
                }
            }
            PolicySpec::Anytime { c } => check_c(c),
            PolicySpec::Constant { arm } if arm >= k => Err(Error::Config(format!(
                "constant policy arm {arm} out of range for k = {k}"
            ))),
            _ => Ok(()),
        }
    }

    /// Fresh state machine for a run of `horizon` rounds on `k` arms.
    pub fn build(&self, k: usize, horizon: u64, seed: u64) -> Result<Box<dyn Policy + Send>> {
        self.validate(k, horizon)?;
        Ok(match *self {
            PolicySpec::Ncb => Box::new(Ncb::new(NcbConfig::new(k, horizon)?, seed)),
            PolicySpec::ModifiedNcb { c, window } => {
                Box::new(ModifiedNcb::new(ModifiedNcbConfig::new(k, window.unwrap_or(horizon), c)?, seed))
            }
            PolicySpec::Anytime { c } => Box::new(Anytime::new(k, c, seed)?),
            PolicySpec::Ucb => Box::new(Ucb::new(k, horizon)?),
            PolicySpec::Uniform => Box::new(Uniform::new(k, seed)),
            PolicySpec::Constant { arm } => Box::new(Constant::new(k, arm)),
        })
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("c must be positive, got {c}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_ties_and_infinities() {
        assert_eq!(argmax_lowest([0.9, 0.5]), 0);
        assert_eq!(argmax_lowest([0.2, 0.9]), 1);
        assert_eq!(argmax_lowest([0.5, 0.5, 0.5]), 0);
        assert_eq!(argmax_lowest([0.5, f64::INFINITY, f64::INFINITY]), 1);
        assert_eq!(argmax_lowest([f64::NEG_INFINITY, f64::NEG_INFINITY]), 0);
    }

    #[test]
    fn arm_stats_mean() {
        let mut s = ArmStats::default();
        assert_eq!(s.empirical_mean(), 0.0);
        for r in [1.0, 0.0, 0.5] {
            s.record(r);
        }
        assert_eq!(s.count, 3);
        assert!((s.empirical_mean() * 3.0 - s.reward_sum).abs() < 1e-12);
    }

    #[test]
    fn spec_json_roundtrip() {
        let specs: Vec<PolicySpec> = serde_json::from_str(
            r#"[{"name":"ncb"},{"name":"modified_ncb"},{"name":"anytime","c":2.5},
                {"name":"constant","arm":1}]"#,
        )
        .unwrap();
        assert_eq!(specs[1], PolicySpec::ModifiedNcb { c: 3.0, window: None });
        assert_eq!(specs[2], PolicySpec::Anytime { c: 2.5 });
        assert_eq!(specs[3].label(), "constant:1");
        assert!(serde_json::from_str::<PolicySpec>(r#"{"name":"thompson"}"#).is_err());
        assert!(serde_json::from_str::<PolicySpec>(r#"{"name":"ncb","c":3}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(PolicySpec::Constant { arm: 2 }.validate(2, 10).is_err());
        assert!(PolicySpec::ModifiedNcb { c: 0.0, window: None }.validate(2, 10).is_err());
        assert!(PolicySpec::ModifiedNcb { c: 3.0, window: Some(5) }.validate(2, 10).is_err());
        assert!(PolicySpec::Ncb.validate(2, 1).is_err());
        assert!(PolicySpec::Uniform.validate(2, 1).is_ok());
    }
}
