use std::process::ExitCode;

fn main() -> ExitCode {
    trisurf::cli::main()
}
