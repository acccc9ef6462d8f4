use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cfs::run::{DEFAULT_EPSILON_LIST, DEFAULT_N_POINTS};
use cfs::{run, Command, Format, OutputError, RunConfig, RunError};
use cfs_core::verification::STANDARD_STEPS;
use clap::{Args, Parser, Subcommand};

/// Complete flux scheme solver for singularly perturbed
/// advection-diffusion-reaction problems on (0, 1).
#[derive(Parser)]
#[command(name = "cfs", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct ProblemArgs {
    /// Built-in example (ex1..ex7) or path to a problem file
    #[arg(long)]
    example: String,
    /// Perturbation parameter [default: 1e-2, or the file's value]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Shift parameter [default: the example's own]
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one problem and write the nodal profile
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of grid points
        #[arg(long, default_value_t = DEFAULT_N_POINTS)]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Max-norm errors and observed orders over a list of step sizes
    Convergence {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated step sizes; each must divide [0, 1]
        #[arg(long, value_delimiter = ',', default_values_t = STANDARD_STEPS)]
        h_list: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// One profile per epsilon, written into the output directory
    SweepEpsilon {
        /// Built-in example (ex1..ex7) or path to a problem file
        #[arg(long)]
        example: String,
        /// Shift parameter [default: the example's own]
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPSILON_LIST)]
        epsilon_list: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_N_POINTS)]
        n: usize,
        /// Output directory; profiles go to standard output when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the built-in examples
    ListExamples,
}

fn to_config(cmd: Cmd) -> RunConfig {
    match cmd {
        Cmd::Solve { problem, n, out } => RunConfig {
            example: Some(problem.example),
            epsilon: problem.epsilon,
            mu: problem.mu,
            n_points: n,
            output: out.output,
            format: out.format,
            ..RunConfig::new(Command::Solve)
        },
        Cmd::Convergence { problem, h_list, out } => RunConfig {
            example: Some(problem.example),
            epsilon: problem.epsilon,
            mu: problem.mu,
            h_list,
            output: out.output,
            format: out.format,
            ..RunConfig::new(Command::Convergence)
        },
        Cmd::SweepEpsilon {
            example,
            mu,
            epsilon_list,
            n,
            output,
            format,
        } => RunConfig {
            example: Some(example),
            mu,
            epsilon_list,
            n_points: n,
            output,
            format,
            ..RunConfig::new(Command::SweepEpsilon)
        },
        Cmd::ListExamples => RunConfig::new(Command::ListExamples),
    }
}

fn broken_pipe(e: &RunError) -> bool {
    let err = match e {
        RunError::Output(OutputError::Io(err)) => err,
        RunError::Output(OutputError::Csv(c)) => match c.kind() {
            csv::ErrorKind::Io(err) => err,
            _ => return false,
        },
        _ => return false,
    };
    err.kind() == io::ErrorKind::BrokenPipe
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let config = to_config(cli.command);
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let result = run(&config, &mut lock);
    let _ = lock.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away, e.g. piped into `head`
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
