use clap::Parser;

fn main() {
    std::process::exit(exact_wkb_cli::run(exact_wkb_cli::Cli::parse()));
}
