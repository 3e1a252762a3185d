use clap::Parser;
use hvzlab::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for p in outcome.written {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("hvzlab: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
