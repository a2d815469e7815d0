use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = match braggsim_cli::Args::try_parse() {
        Ok(args) => args,
        // Routes --help/--version to stdout with exit code 0 and argument
        // errors to stderr with exit code 2.
        Err(error) => error.exit(),
    };
    let outcome = braggsim_cli::resolve(&args).and_then(|config| braggsim_cli::run(&config));
    match outcome {
        Ok(summary) => {
            println!(
                "wrote {} file(s) for {} cell(s) under {}",
                summary.files.len(),
                summary.cell_count,
                summary.out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
