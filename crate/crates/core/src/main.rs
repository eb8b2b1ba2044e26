use std::process::ExitCode;

fn main() -> ExitCode {
    isoshrink::cli::main_entry()
}
