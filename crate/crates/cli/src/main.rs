use clap::Parser;

fn main() {
    let cli = anosov_cli::Cli::parse();
    std::process::exit(anosov_cli::main_with(&cli));
}
