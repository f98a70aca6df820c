use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{BanditInstance, Distribution};
use crate::policies::PolicySpec;

/// Version stamped into every file this crate reads or writes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub arms: Vec<Distribution>,
    pub policies: Vec<PolicySpec>,
    /// Strictly increasing horizons `T`.
    pub horizons: Vec<u64>,
    pub replications: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub metrics: MetricsRequest,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsRequest {
    /// Exponents of the generalized-mean welfare to report (each `p <= 1`).
    #[serde(default)]
    pub p_values: Vec<f64>,
    /// Attach good-event and `τ` diagnostics to the JSON report.
    #[serde(default)]
    pub diagnostics: bool,
}

/// File names, relative to the `--out` directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_json")]
    pub json: String,
}

fn default_csv() -> String {
    "results.csv".into()
}

fn default_json() -> String {
    "report.json".into()
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            csv: default_csv(),
            json: default_json(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn instance(&self) -> Result<BanditInstance> {
        BanditInstance::from_distributions(&self.arms)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let instance = self.instance()?;
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.horizons.is_empty() {
            return Err(Error::Config("horizons must be nonempty".into()));
        }
        if self.horizons[0] == 0 || self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be positive and strictly increasing".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy is required".into()));
        }
        let mut labels = HashSet::new();
        for p in &self.policies {
            if !labels.insert(p.label()) {
                return Err(Error::Config(format!("policy `{}` listed twice", p.label())));
            }
            for &t in &self.horizons {
                p.validate(instance.k(), t)?;
            }
        }
        if let Some(p) = self.metrics.p_values.iter().find(|p| p.is_nan() || **p > 1.0 || p.is_infinite()) {
            return Err(Error::Config(format!("p-mean exponent {p} must be finite and <= 1")));
        }
        Ok(())
    }

    /// Confidence constant used for E-event and `τ` diagnostics.
    pub fn diagnostics_c(&self) -> f64 {
        self.policies
            .iter()
            .find_map(|p| match *p {
                PolicySpec::ModifiedNcb { c, .. } | PolicySpec::Anytime { c } => Some(c),
                _ => None,
            })
            .unwrap_or(crate::policies::DEFAULT_C)
    }
}
