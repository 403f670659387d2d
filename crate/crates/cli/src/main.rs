use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpsums_cli::config::{ConfigError, ExperimentConfig, Overrides};
use fpsums_cli::report::Report;
use fpsums_cli::suites::{run_selected, run_suite};

#[derive(Parser)]
#[command(name = "fpsums", version, about = "Counting and character-sum experiments over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Exact identities and inequalities on random instances.
    Identities,
    /// Fast counters against brute-force references.
    Oracles,
    /// Skeleton comparisons over a range of primes.
    Sweep,
    /// Exponent-region predicates on a grid.
    Regions,
    /// A single bilinear character sum.
    Charsum,
    /// Every suite listed in the configuration.
    All,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Drop configured primes above this value.
    #[arg(long = "max-p", global = true)]
    max_p: Option<u64>,
    /// Record per-cell wall time in the `ms` column.
    #[arg(long, global = true)]
    timing: bool,
}

fn run(cli: &Cli) -> Result<Report, ConfigError> {
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.common.seed,
        workers: cli.common.workers,
        out: cli.common.out.clone(),
        epsilon: cli.common.epsilon,
        max_p: cli.common.max_p,
        timing: cli.common.timing,
    });
    cfg.validate()?;
    let name = match cli.command {
        Command::Identities => "identities",
        Command::Oracles => "oracles",
        Command::Sweep => "sweep",
        Command::Regions => "regions",
        Command::Charsum => "charsum",
        Command::All => "all",
    };
    let report = if name == "all" { run_selected(&cfg)? } else { run_suite(name, &cfg)? };
    let io = |source: std::io::Error| ConfigError::Io {
        path: cfg.out.clone(),
        source,
    };
    std::fs::create_dir_all(&cfg.out).map_err(io)?;
    std::fs::write(cfg.out.join(format!("{name}.config.toml")), cfg.to_toml()).map_err(io)?;
    report.write_files(&cfg.out, name).map_err(io)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for (suite, c) in report.counts() {
                println!(
                    "{suite}: {} pass, {} fail, {} skip, {} report",
                    c.pass, c.fail, c.skip, c.report
                );
            }
            if report.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
