use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qhj_cli::config::{parse_param, OutputKind, Overrides};
use qhj_cli::{execute, list_potentials, Command, EXIT_OK};

#[derive(Debug, Parser)]
#[command(
    name = "qhj",
    version,
    about = "Bound states of exactly solvable potentials from their momentum-function singularities"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Solve the requested levels and compare them with the finite-difference oracle.
    Solve(Job),
    /// Solve, compare, and run every momentum-function probe; exit 3 if any check fails.
    Verify(Job),
    /// Probe one level and write its momentum function on a complex grid.
    Qmf {
        #[command(flatten)]
        job: Job,
        #[arg(long)]
        level: usize,
    },
    /// List the available potentials.
    List,
}

#[derive(Debug, Args)]
struct Job {
    /// JSON job configuration.
    config: PathBuf,
    #[arg(long)]
    potential: Option<String>,
    /// Parameter override, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    oracle_x_min: Option<f64>,
    #[arg(long)]
    oracle_x_max: Option<f64>,
    #[arg(long)]
    oracle_count: Option<usize>,
    /// Comma-separated subset of spectrum, wavefunctions, qmf.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<OutputKind>>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl Job {
    fn overrides(&self) -> Overrides {
        Overrides {
            potential: self.potential.clone(),
            params: self.params.clone(),
            levels: self.levels,
            oracle_x_min: self.oracle_x_min,
            oracle_x_max: self.oracle_x_max,
            oracle_count: self.oracle_count,
            outputs: self.outputs.clone(),
            output_dir: self.output_dir.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Sub::List => {
            print!("{}", list_potentials());
            EXIT_OK
        }
        Sub::Solve(job) => execute(Command::Solve, &job.config, &job.overrides()),
        Sub::Verify(job) => execute(Command::Verify, &job.config, &job.overrides()),
        Sub::Qmf { job, level } => execute(Command::Qmf { level }, &job.config, &job.overrides()),
    };
    ExitCode::from(code as u8)
}
