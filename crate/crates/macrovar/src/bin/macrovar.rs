use clap::Parser;

fn main() {
    let cli = macrovar::cli::Cli::parse();
    std::process::exit(macrovar::cli::run(cli));
}
