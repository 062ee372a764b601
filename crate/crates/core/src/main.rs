use std::process::ExitCode;

fn main() -> ExitCode {
    dyadic_cf::cli::main()
}
