use std::process::ExitCode;

fn main() -> ExitCode {
    ibeta_uniform::cli::main()
}
