use clap::Parser;

fn main() {
    let cli = bae_cli::Cli::parse();
    match bae_cli::run(cli) {
        Ok(outputs) => {
            for path in outputs {
                println!("wrote {}", path.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
