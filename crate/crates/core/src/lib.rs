//! Multi-armed bandit simulation for Nash regret.
//!
//! Policies ([`policies`]) play against canonical-model reward tables
//! ([`table`]); the [`metrics`] module turns Monte Carlo ensembles of runs into
//! Nash regret, average regret and related welfare estimates, and
//! [`diagnostics`] checks the concentration events behind the regret bounds.
//! The [`harness`] module ties these into reproducible experiments.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod instance;
pub mod metrics;
pub mod policies;
pub mod rng;
pub mod runner;
pub mod table;

pub use error::{Error, Result};
pub use instance::{counterexample_instance, make_instance, ArmSpec, BanditInstance, Distribution};
pub use metrics::{Ensemble, PerRoundMeans, RegretReport};
pub use policies::{Policy, PolicySpec};
pub use runner::{run_policy, Trajectory};
pub use table::{build_reward_table, LazyTable, RewardSource, RewardTable};
