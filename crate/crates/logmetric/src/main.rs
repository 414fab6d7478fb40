use std::process::ExitCode;

fn main() -> ExitCode {
    logmetric::cli::run()
}
