//! Batch front end: lower structured-matrix specs to circuits, verify
//! them against the dense oracle, compare summand counts, and emit
//! bounds reports.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qubitizer::cli::{self, JobConfig, Query};

#[derive(Parser)]
#[command(name = "qubitizer", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the requested query circuit and report.
    Build(JobArgs),
    /// Verify the query against the dense oracle; exit 1 on mismatch.
    Verify(JobArgs),
    /// Compare builder summand counts with their closed forms.
    Count(JobArgs),
    /// Compute sampling and Trotter bounds.
    Bounds(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Path to the JSON matrix spec.
    #[arg(long, default_value = "spec.json")]
    spec: PathBuf,
    /// Which query to synthesize.
    #[arg(long, value_enum, default_value_t = Query::Hs)]
    query: Query,
    /// Evolution time.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Trotter number.
    #[arg(long, default_value_t = 1)]
    steps: usize,
    /// Product-formula order (1 or 2).
    #[arg(long, default_value_t = 1)]
    order: u8,
    /// Variant override for circulant / anti-circulant specs.
    #[arg(long)]
    variant: Option<String>,
    /// Verification tolerance (defaults to 1e-10 or $QUBITIZER_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Monte-Carlo shot count for bounds reports.
    #[arg(long)]
    shots: Option<u64>,
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Circuit output path (.qbc) for build, CSV path for count.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report output path (JSON); stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Sweep diagonal indices 1..=N instead of reading a spec (count).
    #[arg(long)]
    sweep: Option<u64>,
}

impl JobArgs {
    fn into_config(self) -> Result<JobConfig, String> {
        let mut config = JobConfig::new(self.spec, self.query);
        config.t = self.t;
        config.steps = self.steps;
        if !matches!(self.order, 1 | 2) {
            return Err(format!("order must be 1 or 2, got {}", self.order));
        }
        config.order = self.order;
        config.variant = self.variant;
        if let Some(tol) = self.tol {
            if tol != 0.0 && tol < f64::EPSILON {
                return Err(format!("tolerance {tol} below machine epsilon"));
            }
            config.tolerance = tol;
        }
        config.shots = self.shots;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.out = self.out;
        config.report = self.report;
        config.sweep = self.sweep;
        Ok(config)
    }
}

fn main() {
    let cli = Cli::parse();
    let (name, args) = match cli.command {
        Command::Build(args) => ("build", args),
        Command::Verify(args) => ("verify", args),
        Command::Count(args) => ("count", args),
        Command::Bounds(args) => ("bounds", args),
    };
    let code = match args.into_config() {
        Ok(config) => cli::run(name, &config),
        Err(message) => {
            println!(
                "{}",
                serde_json::json!({ "error": { "kind": "usage", "message": message } })
            );
            2
        }
    };
    std::process::exit(code);
}
