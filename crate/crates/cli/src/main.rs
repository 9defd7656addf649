use std::process::ExitCode;

fn main() -> ExitCode {
    biharmonic::cli::main(std::env::args_os())
}
