use clap::Parser;
use hschwarz_cli::{run, Cli, EXIT_ERROR};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    if out.exit_code == EXIT_ERROR {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    std::process::exit(out.exit_code);
}
