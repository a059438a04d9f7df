use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use flocksim::cli::{execute, Cli, CliError, Command, EXIT_PARSE, EXIT_RUNTIME};

fn run(cli: &Cli) -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let name = match &cli.command {
        Command::Simulate(_) => "simulate",
        Command::Analyze(_) => "analyze",
        Command::Lowerbound(_) => "lowerbound",
        Command::Spectrum(_) => "spectrum",
        Command::Residue(_) => "residue",
    };
    execute(cli, &mut out).with_context(|| format!("{name} failed"))?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    let started = std::time::Instant::now();
    let result = run(&cli);
    if cli.verbose > 0 {
        eprintln!("elapsed: {:.3} s", started.elapsed().as_secs_f64());
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<CliError>().map_or(EXIT_RUNTIME, CliError::exit_code))
        }
    }
}
