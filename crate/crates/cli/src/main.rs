use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};
use qel::{emit, load_scenario, run, CliError, Format, Scenario};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "qel", version, about = "Run and validate qel scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenarios and write their result tables.
    Run {
        /// Scenario file; repeat to run a sweep.
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Output file, or directory when several scenarios are given.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenarios run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Parse and validate scenarios without running them.
    Validate {
        #[arg(long, required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
    },
}

struct Job {
    file: PathBuf,
    scenario: Scenario,
    seed: u64,
    format: Format,
    dest: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QEL_LOG", "warn"))
        .format_timestamp(None)
        .init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn report(e: &CliError) -> u8 {
    error!("{e}");
    eprintln!("error: {e}");
    e.exit_code()
}

fn dispatch(cmd: Command) -> Result<(), u8> {
    match cmd {
        Command::Validate { scenario } => {
            let mut worst = 0;
            for file in &scenario {
                match load_scenario(file) {
                    Ok(s) => println!("ok {} ({})", file.display(), s.kind.name()),
                    Err(e) => worst = worst.max(report(&e)),
                }
            }
            if worst == 0 {
                Ok(())
            } else {
                Err(worst)
            }
        }
        Command::Run { scenario, seed, format, out, jobs } => {
            let jobs_list = plan(&scenario, seed, format, out.as_deref()).map_err(|e| report(&e))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| report(&CliError::Numerical(format!("thread pool: {e}"))))?;
            let results: Vec<Result<(), CliError>> = pool.install(|| jobs_list.par_iter().map(execute).collect());
            let worst = results.iter().filter_map(|r| r.as_ref().err()).map(report).max().unwrap_or(0);
            if worst == 0 {
                Ok(())
            } else {
                Err(worst)
            }
        }
    }
}

/// Load every scenario and decide where its output goes before running any.
fn plan(files: &[PathBuf], seed: Option<u64>, format: Option<Format>, out: Option<&Path>) -> Result<Vec<Job>, CliError> {
    let sweep = files.len() > 1;
    if let Some(dir) = out.filter(|_| sweep) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    files
        .iter()
        .map(|file| {
            let scenario = load_scenario(file)?;
            let format = format.or(scenario.output.format).unwrap_or_default();
            let dest = match (out, sweep) {
                (Some(dir), true) => {
                    let stem = file.file_stem().unwrap_or_default().to_string_lossy();
                    Some(dir.join(format!("{stem}.{}", format.extension())))
                }
                (Some(path), false) => Some(path.to_path_buf()),
                (None, _) => scenario.output.path.clone(),
            };
            if sweep && dest.is_none() {
                return Err(CliError::validation(
                    file.display().to_string(),
                    "several scenarios need --out <dir> or output.path in each scenario",
                ));
            }
            Ok(Job { file: file.clone(), seed: seed.unwrap_or(scenario.seed), scenario, format, dest })
        })
        .collect()
}

fn execute(job: &Job) -> Result<(), CliError> {
    let name = job.file.display().to_string();
    info!("running {name} with seed {}", job.seed);
    let table = run(&job.scenario, job.seed).map_err(|e| e.in_file(&name))?;
    let bytes = emit(&table, job.format)?;
    match &job.dest {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| CliError::io(path, e))?;
            info!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(())
}
