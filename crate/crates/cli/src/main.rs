use clap::Parser;
use scarf_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = scarf_cli::run(&cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
