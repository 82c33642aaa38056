use clap::Parser;
use pixcode::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("pixcode: {}", e.diagnostic());
        std::process::exit(e.exit_code());
    }
}
