use std::process::ExitCode;

fn main() -> ExitCode {
    let code = crtk::cli::run(std::env::args().skip(1));
    ExitCode::from(code as u8)
}
