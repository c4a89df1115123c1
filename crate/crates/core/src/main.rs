use causal_diamond::cli::{self, Cli, EXIT_OK, EXIT_USAGE};
use clap::Parser;

fn main() {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = cli::run(&parsed, &mut stdout) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
