use clap::Parser;
use rpod_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = rpod_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
