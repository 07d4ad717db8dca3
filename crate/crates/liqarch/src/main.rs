use std::process::ExitCode;

use clap::{Parser, Subcommand};

use liqarch::config::Overrides;
use liqarch::pipeline::Rows;
use liqarch::{Error, Pipeline, RunConfig};

#[derive(Parser)]
#[command(name = "liqarch", version, about = "Liquidity-adjusted ARMA-GARCH backtests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, env = "LIQARCH_THREADS")]
    threads: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate a synthetic minute-bar universe or a planted daily fixture.
    Synth,
    /// Parse, sort and validate minute-bar CSVs.
    Ingest,
    /// Daily liquidity records, descriptive statistics and histograms.
    Liquidity,
    /// Full-sample ARMA-GARCH fits.
    Fit,
    /// Rolling-window fits and one-step forecasts.
    Backtest,
    /// t-tests, ADF and ANOVA reports.
    Report,
    /// TMV and LAMV portfolio backtests.
    Portfolio,
    /// Every stage in order.
    Run,
}

fn print_rows(rows: &Rows) {
    for (file, n) in rows {
        println!("{file}\t{n}");
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let cfg = RunConfig::from_overrides(&cli.overrides)?;
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let pipeline = Pipeline::new(cfg, cli.threads)?;
    let rows = match cli.command {
        Command::Synth => pipeline.synth()?,
        Command::Ingest => pipeline.ingest()?,
        Command::Liquidity => pipeline.liquidity()?,
        Command::Fit => pipeline.fit()?,
        Command::Backtest => pipeline.backtest()?,
        Command::Report => pipeline.report()?,
        Command::Portfolio => pipeline.portfolio()?,
        Command::Run => {
            for rows in pipeline.run()?.values() {
                print_rows(rows);
            }
            return Ok(());
        }
    };
    print_rows(&rows);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
