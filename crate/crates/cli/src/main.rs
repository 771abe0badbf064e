use std::process::ExitCode;

use clap::Parser;
use l2curves_cli::run::{run, Cli, Context};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let mut ctx = Context::from_env(&mut stdout);
    match run(cli, &mut ctx) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("l2curves: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
