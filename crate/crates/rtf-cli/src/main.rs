use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(rtf_cli::cli::dispatch(std::env::args()) as u8)
}
