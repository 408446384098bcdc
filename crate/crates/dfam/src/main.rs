use std::process::ExitCode;

use dfam::cli::{self, CliFailure};

fn main() -> ExitCode {
    match cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                CliFailure::Clap(e) if !e.use_stderr() => {
                    let _ = e.print();
                }
                CliFailure::Clap(e) => {
                    let text = e.to_string();
                    let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
                    eprintln!("error: category=usage message={first:?}");
                }
                CliFailure::Run(e) => eprintln!("{}", e.report_line()),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
