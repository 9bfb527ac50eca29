use std::process::ExitCode;

fn main() -> ExitCode {
    tgc_cli::main_with(std::env::args_os())
}
