//! `ehopt` — scenario files in, power schedules and Monte Carlo comparisons
//! out, with brute-force cross-checks one subcommand away.

mod commands;
mod output;
mod scenario;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ehopt",
    about = "Power-allocation solvers for energy-harvesting transmitters",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write schedule.csv + summary.csv.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for the CSV files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Feasibility/comparison tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        /// Seed override for stochastic solves.
        #[arg(long)]
        seed: Option<u64>,
        /// Trial-count override for stochastic solves.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Monte Carlo policy comparison; writes compare.csv.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated policies: offline-case1, dp-case2, dp-case3,
        /// myopic, `constant:<power>`.
        #[arg(long, value_delimiter = ',', required = true)]
        policies: Vec<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the matching brute-force oracle and report the solver delta;
    /// exits 1 when |delta| exceeds the tolerance.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Schema-validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn main() {
    // the only environment the tool reads: worker count for parallel sweeps
    if let Ok(workers) = std::env::var("EHOPT_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            scenario,
            out,
            tol,
            seed,
            trials,
        } => commands::cmd_solve(
            &scenario,
            &out,
            &commands::SolveOverrides { tol, seed, trials },
        ),
        Command::Compare {
            scenario,
            policies,
            trials,
            seed,
            out,
        } => commands::cmd_compare(&scenario, &policies, trials, seed, &out),
        Command::Oracle {
            scenario,
            grid_step,
            tol,
            out,
        } => commands::cmd_oracle(&scenario, grid_step, tol, &out),
        Command::Validate { scenario } => commands::cmd_validate(&scenario),
    };
    std::process::exit(code);
}
