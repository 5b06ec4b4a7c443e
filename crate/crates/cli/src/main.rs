use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use framelab::experiment::{self, ExperimentConfig, Kind, RunError};

/// Exact experiments on continuous Schauder frames.
#[derive(Parser)]
#[command(name = "framelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory for report.json and table.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct KindArgs {
    /// JSON file with the experiment parameters; defaults apply otherwise.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Fill runtime columns with wall-clock times.
    #[arg(long)]
    record_timing: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certify a translate-frame generator.
    ValidateGenerator(KindArgs),
    /// Full-line synthesis of random window vectors.
    Reconstruct(KindArgs),
    /// Biorthogonality matrix of the translate frame.
    Biorthogonality(KindArgs),
    /// Sampled lower bounds for the unconditionality constants.
    SuppressionScan(KindArgs),
    /// Random draws of the Young-type translate inequality.
    YoungFuzz(KindArgs),
    /// Box-integral convergence table for the Haar wavelet frame.
    WaveletReconstruct(KindArgs),
    /// Box integral against its conjugated evaluation.
    WaveletIdentity(KindArgs),
    /// Exact three-term counterexample in c_0.
    Counterexample(KindArgs),
    /// Shrinking and bounded-completeness probes on a discrete frame.
    Diagnostics(KindArgs),
    /// Reconstruction error of lattice samplings.
    SamplingSweep(KindArgs),
}

fn kind_config(kind: Kind, args: &KindArgs) -> Result<ExperimentConfig, RunError> {
    let mut config = ExperimentConfig::new(kind);
    config.record_timing = args.record_timing;
    if let Some(path) = &args.params {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        config.params = serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(config)
}

fn build(command: &Command) -> Result<(ExperimentConfig, &Common), RunError> {
    let (kind, args) = match command {
        Command::Run { config, common } => {
            return Ok((ExperimentConfig::from_file(config)?, common))
        }
        Command::ValidateGenerator(a) => (Kind::ValidateGenerator, a),
        Command::Reconstruct(a) => (Kind::Reconstruct, a),
        Command::Biorthogonality(a) => (Kind::Biorthogonality, a),
        Command::SuppressionScan(a) => (Kind::SuppressionScan, a),
        Command::YoungFuzz(a) => (Kind::YoungFuzz, a),
        Command::WaveletReconstruct(a) => (Kind::WaveletReconstruct, a),
        Command::WaveletIdentity(a) => (Kind::WaveletIdentity, a),
        Command::Counterexample(a) => (Kind::Counterexample, a),
        Command::Diagnostics(a) => (Kind::Diagnostics, a),
        Command::SamplingSweep(a) => (Kind::SamplingSweep, a),
    };
    Ok((kind_config(kind, args)?, &args.common))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (mut config, common) = match build(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("framelab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(tol) = common.tol {
        config.tol = Some(tol);
    }
    match experiment::run(&config) {
        Ok(outcome) => {
            if !common.quiet {
                for line in &outcome.lines {
                    println!("{line}");
                }
                println!("report: {}", outcome.report.display());
                if let Some(t) = &outcome.table {
                    println!("table: {}", t.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("framelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
