use clap::Parser;
use nsamg_cli::config::Cli;
use nsamg_cli::error::EXIT_CONFIG;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = nsamg_cli::run(&cli, &mut stdout) {
        eprintln!("nsamg: {e}");
        std::process::exit(e.exit_code());
    }
}
