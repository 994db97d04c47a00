use clap::Parser;
use fbox_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("fbox: {err}");
        std::process::exit(err.exit_code());
    }
}
