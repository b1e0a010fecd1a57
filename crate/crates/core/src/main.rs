use std::process;

use clap::error::ErrorKind;
use clap::Parser;

use component_shrink::cli::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                process::exit(0);
            }
            eprint!("{e}");
            process::exit(1);
        }
    };
    if let Err(e) = cli.run() {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
