use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(gaussent_cli::run(std::env::args_os()))
}
