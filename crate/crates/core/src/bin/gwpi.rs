use clap::Parser;

fn main() {
    std::process::exit(gwpi::cli::run(gwpi::cli::Cli::parse()));
}
