//! The `bellex` command-line driver.
//!
//! Every subcommand runs one scenario end to end (encode, exact table,
//! sample, estimate, recover) and writes a single deterministic report. The
//! report echoes the full configuration including the seed, so any run can
//! be replayed from its own output.

mod report;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};

pub use report::{run_command, CommandOutput};
pub use verify::{run_checks, CheckResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bellex", version, about = "Secret message exchange through shared entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two qubit parties sharing a Bell pair
    Exchange(RunArgs),
    /// Two qutrit parties; messages use hyperspherical angles
    Qudit3(RunArgs),
    /// Three qubit parties sharing a GHZ state
    Ghz3(RunArgs),
    /// Two qubit parties whose axes differ by --alignment
    Misaligned(RunArgs),
    /// Direction sharing by repeated singlet measurements
    Baseline(RunArgs),
    /// Run the built-in invariant checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Exchange,
    Qudit3,
    Ghz3,
    Misaligned,
    Baseline,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyChoice {
    #[default]
    Standard,
    LinearOptics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_c: f64,
    /// Second polar angle of party A's qutrit
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta2_a: f64,
    /// Phase of the third amplitude of party A's qutrit
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi2_a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta2_b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi2_b: f64,
    /// Relative axis rotation in radians
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alignment: f64,
    #[arg(long, value_enum, default_value_t = PolicyChoice::Standard)]
    pub policy: PolicyChoice,
    /// Independent repetitions; trial k > 0 uses a seed derived from --seed
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// A fully resolved invocation. Everything except the output path is echoed
/// into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub rounds: u64,
    pub seed: u64,
    pub theta_a: f64,
    pub phi_a: f64,
    pub theta_b: f64,
    pub phi_b: f64,
    pub theta_c: f64,
    pub phi_c: f64,
    pub theta2_a: f64,
    pub phi2_a: f64,
    pub theta2_b: f64,
    pub phi2_b: f64,
    pub alignment: f64,
    pub policy: PolicyChoice,
    pub trials: u64,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        RunConfig {
            scenario,
            rounds: 1000,
            seed: 0,
            theta_a: 0.0,
            phi_a: 0.0,
            theta_b: 0.0,
            phi_b: 0.0,
            theta_c: 0.0,
            phi_c: 0.0,
            theta2_a: 0.0,
            phi2_a: 0.0,
            theta2_b: 0.0,
            phi2_b: 0.0,
            alignment: 0.0,
            policy: PolicyChoice::Standard,
            trials: 1,
            format: Format::Json,
            output: None,
        }
    }

    fn from_args(scenario: ScenarioKind, a: RunArgs) -> Self {
        RunConfig {
            scenario,
            rounds: a.rounds,
            seed: a.seed,
            theta_a: a.theta_a,
            phi_a: a.phi_a,
            theta_b: a.theta_b,
            phi_b: a.phi_b,
            theta_c: a.theta_c,
            phi_c: a.phi_c,
            theta2_a: a.theta2_a,
            phi2_a: a.phi2_a,
            theta2_b: a.theta2_b,
            phi2_b: a.phi2_b,
            alignment: a.alignment,
            policy: a.policy,
            trials: a.trials,
            format: a.format,
            output: a.output,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario != ScenarioKind::Verify && self.rounds == 0 {
            return Err(Error::InvalidArgument("--rounds must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("--trials must be at least 1".into()));
        }
        let angles = [
            self.theta_a,
            self.phi_a,
            self.theta_b,
            self.phi_b,
            self.theta_c,
            self.phi_c,
            self.theta2_a,
            self.phi2_a,
            self.theta2_b,
            self.phi2_b,
            self.alignment,
        ];
        if angles.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("angles must be finite".into()));
        }
        if self.policy == PolicyChoice::LinearOptics && self.scenario == ScenarioKind::Qudit3 {
            return Err(Error::InvalidArgument("qudit3 has no linear-optics policy".into()));
        }
        Ok(())
    }
}

impl From<Command> for RunConfig {
    fn from(cmd: Command) -> Self {
        match cmd {
            Command::Exchange(a) => RunConfig::from_args(ScenarioKind::Exchange, a),
            Command::Qudit3(a) => RunConfig::from_args(ScenarioKind::Qudit3, a),
            Command::Ghz3(a) => RunConfig::from_args(ScenarioKind::Ghz3, a),
            Command::Misaligned(a) => RunConfig::from_args(ScenarioKind::Misaligned, a),
            Command::Baseline(a) => RunConfig::from_args(ScenarioKind::Baseline, a),
            Command::Verify(v) => RunConfig {
                seed: v.seed,
                format: v.format,
                output: v.output,
                ..RunConfig::new(ScenarioKind::Verify)
            },
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoSolution { .. } | Error::WitnessNotFound => EXIT_NO_SOLUTION,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (program name first), runs the command, writes the report
/// to `--output` or stdout and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let config = RunConfig::from(cli.command);
    let output = match run_command(&config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("bellex: {e}");
            return exit_code(&e);
        }
    };
    let written = match &config.output {
        Some(path) => fs::write(path, &output.report),
        None => std::io::stdout().write_all(output.report.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("bellex: {}", Error::from(e));
        return EXIT_IO;
    }
    if let Some(msg) = &output.message {
        eprintln!("bellex: {msg}");
    }
    output.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "bellex", "exchange", "--rounds", "10", "--seed", "7", "--theta-a", "0.5", "--phi-b", "-1.0",
        ])
        .unwrap();
        let cfg = RunConfig::from(cli.command);
        assert_eq!(cfg.scenario, ScenarioKind::Exchange);
        assert_eq!((cfg.rounds, cfg.seed, cfg.theta_a, cfg.phi_b), (10, 7, 0.5, -1.0));
        assert_eq!(cfg.policy, PolicyChoice::Standard);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = RunConfig::new(ScenarioKind::Exchange);
        cfg.rounds = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::new(ScenarioKind::Qudit3);
        cfg.policy = PolicyChoice::LinearOptics;
        assert!(cfg.validate().is_err());
        assert_eq!(exit_code(&Error::NoSolution { best_residual: 1.0 }), EXIT_NO_SOLUTION);
        assert_eq!(exit_code(&Error::Io("x".into())), EXIT_IO);
    }

    #[test]
    fn unknown_subcommand_is_invalid() {
        assert_eq!(main_with_args(["bellex", "teleport"]), EXIT_INVALID);
        assert_eq!(main_with_args(["bellex", "exchange", "--rounds", "0"]), EXIT_INVALID);
    }
}
