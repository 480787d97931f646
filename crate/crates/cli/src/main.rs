use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chidenn_td::alloc::CountingAllocator;
use chidenn_td_cli::commands::{self, exit, CliError};
use chidenn_td_cli::config::{ProblemId, RunConfig};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

#[derive(Parser)]
#[command(
    name = "chtd",
    version,
    about = "Separated space(-time) Galerkin solver and benchmarks"
)]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once; writes solution.chtd, trace.csv and metadata.txt.
    Solve,
    /// Energy error over grids, ranks and basis variants (Poisson).
    ConvergenceStudy,
    /// Space-time TD against explicit FDM over grid sizes (diffusion).
    Benchmark,
    /// Compute the full-grid reference field.
    Reference,
    /// Print the header and summary of a CHTD1 file.
    Inspect { file: PathBuf },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let load = |base| RunConfig::load(base, cli.config.as_deref(), &cli.set);
    match &cli.command {
        Command::Solve => {
            let report = commands::run_solve(&load(ProblemId::Poisson2d)?)?;
            for (k, v) in &report.metrics {
                println!("{k} = {v:e}");
            }
            println!(
                "converged = {} after {} sweeps",
                report.converged,
                report.trace.sweeps.len()
            );
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            Ok(report.exit_code())
        }
        Command::ConvergenceStudy => {
            let cfg = load(ProblemId::Poisson2d)?;
            let rows = commands::run_convergence_study(&cfg)?;
            println!(
                "{} rows written to {}",
                rows.len(),
                cfg.output_dir.join(commands::STUDY_FILE).display()
            );
            Ok(exit::CONVERGED)
        }
        Command::Benchmark => {
            let cfg = load(ProblemId::Diffusion4d)?;
            let records = commands::run_benchmark(&cfg)?;
            for r in &records {
                println!(
                    "{:<4} {:>4} {:<24} {:<22} {:>10.3e} s",
                    r.method.name(),
                    r.points_per_axis,
                    r.grid,
                    r.status,
                    r.wall_seconds
                );
            }
            Ok(exit::CONVERGED)
        }
        Command::Reference => {
            for f in commands::run_reference(&load(ProblemId::Poisson2d)?)? {
                println!("wrote {}", f.display());
            }
            Ok(exit::CONVERGED)
        }
        Command::Inspect { file } => {
            print!("{}", commands::inspect(file)?);
            Ok(exit::CONVERGED)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("chtd: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
