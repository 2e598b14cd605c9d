use clap::Parser;

fn main() {
    let cli = plasmonic::cli::Cli::parse();
    std::process::exit(plasmonic::cli::main_with(cli));
}
