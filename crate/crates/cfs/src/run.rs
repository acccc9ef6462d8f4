use std::io::Write;
use std::path::{Path, PathBuf};

use cfs_core::verification::{n_points_for_step, STANDARD_STEPS};
use cfs_core::{convergence_study, solve, BuiltinExample, ProblemSpec};
use thiserror::Error;

use crate::config::{ConfigError, ProblemConfig};
use crate::output::{write_atomic, write_profile, write_report, Format, OutputError, Profile};

pub const DEFAULT_EPSILON_LIST: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const DEFAULT_N_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Convergence,
    SweepEpsilon,
    ListExamples,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Built-in example name or path to a problem file.
    pub example: Option<String>,
    pub epsilon: Option<f64>,
    pub mu: Option<f64>,
    pub n_points: usize,
    pub h_list: Vec<f64>,
    pub epsilon_list: Vec<f64>,
    /// A file for `solve` and `convergence`, a directory for `sweep-epsilon`.
    /// Standard output when absent.
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            example: None,
            epsilon: None,
            mu: None,
            n_points: DEFAULT_N_POINTS,
            h_list: STANDARD_STEPS.to_vec(),
            epsilon_list: DEFAULT_EPSILON_LIST.to_vec(),
            output: None,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(cfs_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl RunError {
    /// 2 for bad arguments or problem definitions, 1 for failures while
    /// solving or writing.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) | RunError::Config(_) => 2,
            RunError::Solver(_) | RunError::Output(_) => 1,
        }
    }
}

enum Problem {
    Builtin(BuiltinExample),
    File(ProblemConfig),
}

impl Problem {
    fn resolve(name: Option<&str>) -> Result<Self, RunError> {
        let name = name.ok_or_else(|| RunError::Usage("--example is required".into()))?;
        if let Some(ex) = BuiltinExample::from_name(name) {
            return Ok(Problem::Builtin(ex));
        }
        let path = Path::new(name);
        if path.is_file() {
            return Ok(Problem::File(ProblemConfig::load(path)?));
        }
        Err(RunError::Usage(format!(
            "'{name}' is neither a built-in example (ex1..ex7) nor a problem file"
        )))
    }

    fn spec(&self, epsilon: Option<f64>, mu: Option<f64>) -> Result<ProblemSpec, RunError> {
        match self {
            Problem::Builtin(ex) => {
                let eps = epsilon.unwrap_or(cfs_core::problem::DEFAULT_EPSILON);
                let built = match mu {
                    Some(mu) => ex.spec_with_mu(eps, mu),
                    None => ex.spec(eps),
                };
                built.map_err(|e| RunError::Config(ConfigError::Problem(e)))
            }
            Problem::File(cfg) => Ok(cfg.to_spec(epsilon, mu)?),
        }
    }
}

fn emit<W: Write>(
    stdout: &mut W,
    path: Option<&Path>,
    fill: impl FnOnce(&mut dyn Write) -> Result<(), OutputError>,
) -> Result<(), RunError> {
    match path {
        Some(p) => write_atomic(p, fill)?,
        None => fill(stdout)?,
    }
    Ok(())
}

fn check_points(n: usize) -> Result<(), RunError> {
    if n < 3 {
        return Err(RunError::Usage(format!("--n must be at least 3, got {n}")));
    }
    Ok(())
}

/// Executes one command. Results go to `config.output` or to `stdout`.
pub fn run<W: Write>(config: &RunConfig, stdout: &mut W) -> Result<(), RunError> {
    match config.command {
        Command::ListExamples => {
            for ex in BuiltinExample::ALL {
                writeln!(stdout, "{:<4} {}", ex.name(), ex.summary()).map_err(OutputError::from)?;
            }
            Ok(())
        }
        Command::Solve => {
            check_points(config.n_points)?;
            let spec = Problem::resolve(config.example.as_deref())?.spec(config.epsilon, config.mu)?;
            let sol = solve(&spec, config.n_points).map_err(RunError::Solver)?;
            let profile = Profile::from_solution(&spec, &sol);
            emit(stdout, config.output.as_deref(), |w| write_profile(w, &profile, config.format))
        }
        Command::Convergence => {
            if config.h_list.is_empty() {
                return Err(RunError::Usage("--h-list is empty".into()));
            }
            for &h in &config.h_list {
                n_points_for_step(h)
                    .map_err(|_| RunError::Usage(format!("step {h} does not divide [0, 1] into whole cells")))?;
            }
            let spec = Problem::resolve(config.example.as_deref())?.spec(config.epsilon, config.mu)?;
            if spec.exact().is_none() {
                return Err(RunError::Usage(format!(
                    "'{}' has no exact solution to measure errors against",
                    spec.name()
                )));
            }
            let report = convergence_study(&spec, &config.h_list).map_err(RunError::Solver)?;
            emit(stdout, config.output.as_deref(), |w| write_report(w, &report, config.format))
        }
        Command::SweepEpsilon => {
            check_points(config.n_points)?;
            if config.epsilon_list.is_empty() {
                return Err(RunError::Usage("--epsilon-list is empty".into()));
            }
            let problem = Problem::resolve(config.example.as_deref())?;
            let specs = config
                .epsilon_list
                .iter()
                .map(|&eps| problem.spec(Some(eps), config.mu))
                .collect::<Result<Vec<_>, _>>()?;
            for spec in &specs {
                let sol = solve(spec, config.n_points).map_err(RunError::Solver)?;
                let profile = Profile::from_solution(spec, &sol);
                match &config.output {
                    Some(dir) => {
                        let file = dir.join(format!(
                            "{}_eps{:e}.{}",
                            spec.name(),
                            spec.epsilon(),
                            config.format.extension()
                        ));
                        write_atomic(&file, |w| write_profile(w, &profile, config.format))?;
                        writeln!(stdout, "{}", file.display()).map_err(OutputError::from)?;
                    }
                    None => write_profile(&mut *stdout, &profile, config.format)?,
                }
            }
            Ok(())
        }
    }
}
