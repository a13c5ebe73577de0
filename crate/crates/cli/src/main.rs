use clap::Parser;
use loewner_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let outcome = loewner_cli::configure_threads().and_then(|()| loewner_cli::run(&cli));
    if let Err(e) = outcome {
        eprintln!("loewner-lab: {e}");
        std::process::exit(e.exit_code());
    }
}
