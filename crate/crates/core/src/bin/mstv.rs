use std::process::ExitCode;

fn main() -> ExitCode {
    mstv::cli::main_entry()
}
