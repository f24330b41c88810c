use clap::Parser;

fn main() {
    let cli = semproj::Cli::parse();
    if let Err(e) = semproj::run(cli) {
        eprintln!("semproj: {e}");
        std::process::exit(e.exit_code());
    }
}
