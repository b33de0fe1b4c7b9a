use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use towerdescent::cli::{run, Cli, EXIT_INVALID};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run(&cli, &mut out, &mut io::stderr());
    let _ = out.flush();
    ExitCode::from(code as u8)
}
