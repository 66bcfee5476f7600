use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use potential_dcm::cli::{
    parse_config, run_evaluate, run_matrix, run_sample, run_train, variants, CliError, RunConfig, RunOptions, VaryAxis,
};

/// Mesh-free potential solver for graded materials.
#[derive(Debug, Parser)]
#[command(name = "dcm", version)]
struct Args {
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// No progress lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample, train and evaluate one configuration.
    Train { config: PathBuf },
    /// Write the collocation points of a configuration.
    Sample { config: PathBuf },
    /// Evaluate a saved parameter snapshot.
    Evaluate { config: PathBuf, params: PathBuf },
    /// Train one variant per value along an axis and tabulate the results.
    Bench {
        config: PathBuf,
        /// activation, sampler, depth, n_interior, n_per_face or schedule.
        #[arg(long)]
        vary: String,
        /// Comma-separated values; the standard sweep when omitted.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
    },
}

fn load(path: &Path, args: &Args) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn emit(text: &str) -> Result<(), CliError> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    emit(&serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?)
}

fn run(args: &Args) -> Result<(), CliError> {
    let opts = RunOptions { quiet: args.quiet };
    match &args.command {
        Command::Train { config } => json(&run_train(&load(config, args)?, opts)?),
        Command::Sample { config } => {
            let path = run_sample(&load(config, args)?)?;
            emit(&path.display().to_string())
        }
        Command::Evaluate { config, params } => json(&run_evaluate(&load(config, args)?, params)?),
        Command::Bench { config, vary, values } => {
            let cfg = load(config, args)?;
            let axis: VaryAxis = vary.parse()?;
            let vs = variants(&cfg, axis, values)?;
            json(&run_matrix(&cfg, axis, &vs, opts)?)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
