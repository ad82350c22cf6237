use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use multitime_cli::{load_config, run, CliError, OutputFormat, TaskKind};

/// Multi-time correlators of Markovian open quantum systems.
#[derive(Debug, Parser)]
#[command(name = "multitime", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides the configured task.
    #[arg(long, value_enum, value_name = "NAME")]
    task: Option<TaskKind>,
    /// Output file; standard output when neither this nor the config names one.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// ODE tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Largest dense generator dimension d^(2n).
    #[arg(long, value_name = "N")]
    slot_budget: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load_config(&args.config).and_then(|mut config| {
        if let Some(task) = args.task {
            config.task = task;
        }
        if let Some(out) = &args.out {
            config.output.path = Some(out.to_string_lossy().into_owned());
        }
        if let Some(format) = args.format {
            config.output.format = format;
        }
        if args.tol.is_some() {
            config.tol = args.tol;
        }
        if args.slot_budget.is_some() {
            config.slot_budget = args.slot_budget;
        }
        run(&config)
    });
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report(e: &CliError) {
    if e.exit_code() == 2 {
        eprintln!("multitime: numerical failure: {e}");
    } else {
        eprintln!("multitime: {e}");
    }
}
