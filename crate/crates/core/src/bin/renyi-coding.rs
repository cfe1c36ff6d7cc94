use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let code = renyi_coding::cli::run(&argv, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
