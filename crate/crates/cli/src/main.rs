use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vexfrac_cli::{run, write_error, Command, RunOptions};

#[derive(Parser)]
#[command(name = "vexfrac", version, about = "Variable-order fractional p(x)-Laplacian solver and checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the hypotheses of a problem file.
    Validate(Common),
    /// Compute the mountain-pass and local-minimum solutions at one λ.
    Solve(Common),
    /// Run both solvers over a grid of λ values.
    Sweep(Common),
    /// First eigenpair of the discrete operator.
    Eigen(Common),
    /// Randomized inequality suites.
    Verify(Common),
    /// L∞ bootstrap on a stored solution.
    Bootstrap(Common),
    /// validate, sweep, then bootstrap on the best mountain-pass solution.
    Paper(Common),
}

#[derive(Args)]
struct Common {
    /// Problem file (TOML). Defaults to the built-in reference problem.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    cells: usize,
    #[arg(long, default_value_t = 2.0)]
    collar_factor: f64,
    #[arg(long, conflicts_with = "lambda_grid")]
    lambda: Option<f64>,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Gradient-norm tolerance of the solvers.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Solution artifact (solution_mp.json or solution_min.json) for bootstrap.
    #[arg(long)]
    solution: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::Solve(c) => (Command::Solve, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Eigen(c) => (Command::Eigen, c),
        Cmd::Verify(c) => (Command::Verify, c),
        Cmd::Bootstrap(c) => (Command::Bootstrap, c),
        Cmd::Paper(c) => (Command::Paper, c),
    };
    let opts = RunOptions {
        spec: c.spec,
        cells: c.cells,
        collar_factor: c.collar_factor,
        lambda: c.lambda,
        lambda_grid: c.lambda_grid,
        seed: c.seed,
        out: c.out,
        tol: c.tol,
        solution: c.solution,
    };
    match run(command, &opts) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            println!("artifacts written to {}", opts.out.display());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Err(w) = write_error(&opts.out, command, &e) {
                eprintln!("could not write error.json: {w}");
            }
            ExitCode::from(2)
        }
    }
}
