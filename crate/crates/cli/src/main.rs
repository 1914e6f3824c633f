use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ccsim::commands::{cmd_derive, cmd_run, cmd_scan, cmd_verify, parse_grid, OutputOptions};
use ccsim::error::{CliError, Status};

#[derive(Parser)]
#[command(name = "ccsim", version, about = "Simulate and verify charge-conjugation gates in trapped-ion models")]
struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the CSV here instead of the config's [output] path or stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Compare the CSV against this file; a mismatch exits with 1.
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Overwrite the --golden file with the new output.
    #[arg(long)]
    bless: bool,
}

impl Output {
    fn options(self) -> OutputOptions {
        let bless = self.bless || std::env::var("CCSIM_BLESS").is_ok_and(|v| v == "1");
        OutputOptions {
            output: self.output,
            golden: self.golden,
            bless,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Second-order effective Hamiltonian of an .hspec file.
    Derive {
        hspec: PathBuf,
        /// Resonance tolerance (default 1e-9 times the largest frequency).
        #[arg(long)]
        tol: Option<f64>,
        /// Pin a qubit to a level, e.g. `q=g`.
        #[arg(long)]
        project: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Full-versus-effective infidelity over a parameter grid.
    Scan {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        out: Output,
    },
    /// Exact algebraic checks only, no time evolution.
    Verify {
        config: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

fn dispatch(cli: Cli) -> Result<Status, CliError> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Run { config, out } => cmd_run(&config, jobs, &out.options()),
        Command::Verify { config, out } => cmd_verify(&config, jobs, &out.options()),
        Command::Scan { config, param, grid, out } => {
            let grid = parse_grid(&grid)?;
            cmd_scan(&config, &param, &grid, jobs, &out.options())
        }
        Command::Derive {
            hspec,
            tol,
            project,
            output,
        } => cmd_derive(&hspec, tol, project.as_deref(), output.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match dispatch(cli) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
