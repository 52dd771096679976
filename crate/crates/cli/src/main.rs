mod commands;
mod files;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use settings::RawSettings;

/// Permutation flowshop solver with adaptive operator selection.
#[derive(Debug, Parser)]
#[command(name = "opmgr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and print the best sequence found.
    Solve(Common),
    /// Run every variant on every instance and write CSV and JSON reports.
    Experiment(Common),
    /// Check instance files, the registry and the configuration.
    Validate(Common),
    /// Run the built-in correctness suites.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Run only this suite (acceleration, brute-force, wilcoxon, registry).
        #[arg(long)]
        filter: Option<String>,
    },
}

/// Every flag maps to a `plan.*` key of the config file and overrides it.
#[derive(Debug, Args)]
struct Common {
    /// key = value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance file; repeatable.
    #[arg(long)]
    instance: Vec<String>,
    /// Directory of instance files; repeatable.
    #[arg(long)]
    dataset: Vec<String>,
    #[arg(long, value_parser = ["taillard", "vrf"])]
    format: Option<String>,
    /// dqig, sqig, rig, scig or igrs; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    variant: Vec<String>,
    /// Time scale: each run gets n*m/2*t milliseconds. Repeatable.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u64>,
    /// Replications per instance, variant and scale.
    #[arg(long)]
    reps: Option<usize>,
    /// Run seed for solve, base seed for experiment.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["time", "iters"])]
    budget_mode: Option<String>,
    /// Iterations per run with --budget-mode iters.
    #[arg(long)]
    iters: Option<u64>,
    /// Output file for solve, output directory for experiment.
    #[arg(long)]
    out: Option<String>,
    /// Best-known makespans, one "name value" per line.
    #[arg(long)]
    registry: Option<String>,
    /// Write the per-episode trace of solve as JSON lines.
    #[arg(long)]
    trace: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<settings::Settings> {
        let mut raw = match &self.config {
            Some(p) => RawSettings::load(p)?,
            None => RawSettings::default(),
        };
        let join = |v: &[String]| (!v.is_empty()).then(|| v.join(","));
        let nums = |v: &[u64]| (!v.is_empty()).then(|| v.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        raw.set("plan.instance", join(&self.instance));
        raw.set("plan.dataset", join(&self.dataset));
        raw.set("plan.format", self.format.clone());
        raw.set("plan.variant", join(&self.variant));
        raw.set("plan.t", nums(&self.t));
        raw.set("plan.reps", self.reps.map(|v| v.to_string()));
        raw.set("plan.seed", self.seed.map(|v| v.to_string()));
        raw.set("plan.budget_mode", self.budget_mode.clone());
        raw.set("plan.iterations", self.iters.map(|v| v.to_string()));
        raw.set("plan.out", self.out.clone());
        raw.set("plan.registry", self.registry.clone());
        raw.set("plan.trace", self.trace.clone());
        if let Ok(v) = std::env::var("OPMGR_THREADS") {
            raw.set("plan.threads", Some(v));
        }
        let s = raw.resolve()?;
        if let Some(p) = commands::missing_path(&s) {
            return Err(std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"))
                .with_context(|| p.display().to_string());
        }
        Ok(s)
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Solve(c) => commands::solve(&c.settings()?),
        Command::Experiment(c) => commands::experiment(&c.settings()?),
        Command::Validate(c) => commands::validate(&c.settings()?),
        Command::OracleCheck { common, filter } => commands::oracle_check(&common.settings()?, filter.as_deref()),
    }
}

fn is_not_found(err: &anyhow::Error) -> bool {
    err.chain()
        .any(|c| c.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::NotFound))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_not_found(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
