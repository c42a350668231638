use std::process::ExitCode;

use clap::Parser;
use pmmknn_cli::report::render_json;
use pmmknn_cli::{
    cmd_bench_all, cmd_classify, cmd_cv, cmd_tune, Cli, CliError, Command, OutputFormat,
};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Cv(args) => {
            let report = cmd_cv(args)?;
            let text = match args.output {
                OutputFormat::Json => render_json(&report),
                OutputFormat::Csv => report.render_csv(),
                OutputFormat::Table => report.render_table(),
            };
            print!("{text}");
        }
        Command::Tune(args) => {
            let report = cmd_tune(args)?;
            let text = match args.output {
                OutputFormat::Json => render_json(&report),
                OutputFormat::Csv => report.render_csv(),
                OutputFormat::Table => report.render_table(),
            };
            print!("{text}");
        }
        Command::Classify(args) => {
            print!("{}", cmd_classify(args)?);
        }
        Command::BenchAll(args) => {
            let report = cmd_bench_all(args)?;
            let text = match args.output {
                OutputFormat::Json => render_json(&report),
                OutputFormat::Csv => report.render_csv(),
                OutputFormat::Table => report.render_table(),
            };
            print!("{text}");
            if report.datasets.iter().any(|d| d.error.is_some()) {
                return Err(CliError::Runtime(
                    "one or more datasets failed; see report".into(),
                ));
            }
        }
    }
    Ok(())
}
