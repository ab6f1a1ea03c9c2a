use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(netrate::cli::run_from_env() as u8)
}
