//! Command-line front end for the experiment harness.
//!
//! Exit codes: 0 on success, 1 on invalid arguments or configuration,
//! 2 on I/O failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use qgrad::error::{Error, Result};
use qgrad::harness::{
    self, compare_to_reference, emit, reference_for, run_experiment, Algorithm, ExperimentSpec,
    Format,
};
use qgrad::optimizer::QGradientConfig;

#[derive(Parser)]
#[command(
    name = "qgrad",
    version,
    about = "q-gradient global optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded optimization experiments on a benchmark function.
    Run(RunArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Objective function: elp, sch, ros, ackl, rtg, rrtg.
    #[arg(long)]
    function: Option<String>,
    /// Number of independent runs (default 50).
    #[arg(long)]
    runs: Option<u32>,
    /// Initial Gaussian spread sigma0 (default: published value per function).
    #[arg(long)]
    sigma0: Option<f64>,
    /// Initial step length alpha0 (default: published value per function).
    #[arg(long)]
    alpha0: Option<f64>,
    /// Shared reduction factor beta in (0, 1) (default: published value).
    #[arg(long)]
    beta: Option<f64>,
    /// Base seed; run r uses seed + r (default 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation budget per run (default 1000000).
    #[arg(long = "max-evals")]
    max_evals: Option<u64>,
    /// Accuracy target (default: 1e-15 for ackl, 1e-20 otherwise).
    #[arg(long)]
    target: Option<f64>,
    /// Problem dimension (default 20).
    #[arg(long)]
    dim: Option<usize>,
    /// Algorithm: qgrad or sd (default qgrad).
    #[arg(long)]
    algorithm: Option<String>,
    /// Output format: csv, json or table (default table).
    #[arg(long)]
    format: Option<String>,
    /// Write output to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a comparison against the published result tables.
    #[arg(long)]
    compare: bool,
    /// Flat key=value file supplying any of the flags above; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let Command::Run(args) = cli.command;
    match execute(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => 2,
                _ => 1,
            }
        }
    }
}

/// Reads `key` from the config file map, normalizing `-` to `_`.
fn file_get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    let norm = key.replace('-', "_");
    let found = map
        .iter()
        .find(|(k, _)| k.replace('-', "_") == norm)
        .map(|(_, v)| v);
    match found {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            Error::InvalidArgument(format!("config value for `{key}` is invalid: `{raw}`"))
        }),
    }
}

fn pick<T: FromStr>(
    cli: Option<T>,
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    match cli {
        Some(v) => Ok(Some(v)),
        None => file_get(map, key),
    }
}

fn execute(args: RunArgs) -> Result<()> {
    let file_map = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            harness::parse_config_file(&text)?
        }
        None => BTreeMap::new(),
    };

    let function = pick(args.function, &file_map, "function")?.ok_or_else(|| {
        Error::InvalidArgument("missing --function (or `function` in --config)".into())
    })?;
    let reference = reference_for(&function)?;

    let dim = pick(args.dim, &file_map, "dim")?.unwrap_or(20);
    let sigma0 = pick(args.sigma0, &file_map, "sigma0")?.unwrap_or(reference.sigma0);
    let alpha0 = pick(args.alpha0, &file_map, "alpha0")?.unwrap_or(reference.alpha0);
    let beta = pick(args.beta, &file_map, "beta")?.unwrap_or(reference.beta);
    let target = pick(args.target, &file_map, "target")?.unwrap_or(reference.target);
    let max_evals = pick(args.max_evals, &file_map, "max-evals")?.unwrap_or(1_000_000);
    let runs = pick(args.runs, &file_map, "runs")?.unwrap_or(50);
    let base_seed = pick(args.seed, &file_map, "seed")?.unwrap_or(1);
    let algorithm = pick(args.algorithm, &file_map, "algorithm")?
        .unwrap_or_else(|| "qgrad".to_string())
        .parse::<Algorithm>()?;
    let format = pick(args.format, &file_map, "format")?
        .unwrap_or_else(|| "table".to_string())
        .parse::<Format>()?;
    let out: Option<PathBuf> = match args.out {
        Some(p) => Some(p),
        None => file_get::<String>(&file_map, "out")?.map(PathBuf::from),
    };
    let compare = args.compare || file_get::<bool>(&file_map, "compare")?.unwrap_or(false);

    let config = QGradientConfig {
        max_evals,
        target,
        ..QGradientConfig::new(dim, sigma0, alpha0, beta)
    };
    let spec = ExperimentSpec {
        function: function.clone(),
        runs,
        config,
        base_seed,
        algorithm,
    };
    let summary = run_experiment(&spec)?;

    match &out {
        Some(path) => {
            let mut file = fs::File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            emit(&summary, format, &mut file).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(&summary, format, &mut lock).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }

    if compare {
        let report = compare_to_reference(&function, &summary)?;
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        write!(lock, "{report}").map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?;
    }
    Ok(())
}
