use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use debcheck_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let status = run(cli, &mut io::stdin().lock(), &mut out, &mut io::stderr().lock());
    if out.flush().is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(status)
}
