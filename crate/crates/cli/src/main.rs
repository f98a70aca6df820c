use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nash_bandit::harness::{
    self, counterexample_command, diagnose_experiment, results_csv, run_experiment, slopes_csv,
    write_file, Execution, ExperimentConfig, SweepResult, FORMAT_VERSION,
};
use nash_bandit::Error;

/// Nash-regret bandit experiments.
#[derive(Debug, Parser)]
#[command(name = "nash-bandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Run replications on one thread (output is identical either way).
    #[arg(long)]
    serial: bool,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.serial {
            Execution::Serial
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (policy, horizon) cell of a config and write CSV + JSON.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Like `run`, and also fit log-log slopes of Nash regret against T.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// UCB versus NCB on the two-arm instance ((2e)^-T, 1).
    Counterexample {
        #[arg(long = "T")]
        horizon: u64,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Good-event frequencies and exploration-length brackets.
    Diagnose {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in property checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}

fn write_sweep(out: &Path, config: &ExperimentConfig, result: &SweepResult) -> Result<(), Error> {
    write_file(&out.join(&config.output.csv), &results_csv(&result.rows))?;
    write_file(&out.join(&config.output.json), &result.to_json())
}

fn dispatch(command: Command) -> Result<bool, Error> {
    match command {
        Command::Run { config, common } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run_experiment(&cfg, common.exec())?;
            write_sweep(&common.out, &cfg, &result)?;
            print!("{}", results_csv(&result.rows));
            Ok(true)
        }
        Command::Sweep { config, common } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run_experiment(&cfg, common.exec())?;
            write_sweep(&common.out, &cfg, &result)?;
            let slopes = slopes_csv(&result.slopes);
            write_file(&common.out.join("slopes.csv"), &slopes)?;
            print!("{}", results_csv(&result.rows));
            print!("{slopes}");
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            Ok(true)
        }
        Command::Counterexample {
            horizon,
            reps,
            seed,
            common,
        } => {
            let report = counterexample_command(horizon, reps, seed, common.exec())?;
            if !report.precondition_met {
                eprintln!("warning: T = {horizon} does not satisfy T > 25 ln T");
            }
            if report.mu1_clamped {
                eprintln!(
                    "note: mu_1 = exp({:.1}) underflows; sampling uses f64::MIN_POSITIVE, welfare uses the exact log",
                    report.ln_mu1
                );
            }
            let csv = results_csv(&report.rows);
            write_file(&common.out.join("counterexample.csv"), &csv)?;
            write_file(&common.out.join("counterexample.json"), &to_json(&report))?;
            print!("{csv}");
            Ok(true)
        }
        Command::Diagnose { config, common } => {
            let cfg = ExperimentConfig::load(&config)?;
            let reports = diagnose_experiment(&cfg, common.exec())?;
            let doc = serde_json::json!({
                "format_version": FORMAT_VERSION,
                "diagnostics": reports,
            });
            write_file(&common.out.join("diagnostics.json"), &to_json(&doc))?;
            for r in &reports {
                for ev in r.g_events.iter().chain(&r.e_events) {
                    println!(
                        "T={} {}: failures {}/{} (rate {:.4}, lemma bound {:.2e}, applicable {})",
                        r.horizon, ev.event, ev.failures, ev.replications, ev.failure_rate, ev.bound, ev.applicable
                    );
                }
                println!(
                    "T={} tau: {}/{} within [128kS, 968kS] or truncated",
                    r.horizon,
                    r.tau_in_bracket_or_truncated,
                    r.tau.len()
                );
            }
            Ok(true)
        }
        Command::Selftest { common } => {
            let outcomes = harness::selftest(common.exec())?;
            let mut all = true;
            for o in &outcomes {
                println!("[{}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
                all &= o.passed;
            }
            let doc = serde_json::json!({ "format_version": FORMAT_VERSION, "checks": outcomes });
            write_file(&common.out.join("selftest.json"), &to_json(&doc))?;
            Ok(all)
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report") + "\n"
}
