mod args;
mod commands;
mod error;
mod output;
mod setup;

use clap::Parser;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits with 2 on usage errors and 0 for --help / --version
        Err(e) => e.exit(),
    };
    if let Err(e) = commands::execute(cli, &argv) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
