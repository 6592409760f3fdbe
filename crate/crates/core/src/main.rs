use clap::Parser;

fn main() {
    let cli = mlo_sim::cli::Cli::parse();
    if let Err(e) = mlo_sim::cli::main(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
