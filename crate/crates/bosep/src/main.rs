use std::process::ExitCode;

fn main() -> ExitCode {
    bosep::cli::run()
}
