use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let config = match mwlab_cli::parse_args(&argv) {
        Ok(c) => c,
        Err(e) if e.informational => {
            print!("{e}");
            return;
        }
        Err(e) => {
            eprint!("{e}");
            if !e.message.ends_with('\n') {
                eprintln!();
            }
            std::process::exit(mwlab_cli::EXIT_USAGE);
        }
    };
    eprintln!(
        "mwlab: running on primes {} with {} worker(s)",
        config.scan, config.workers
    );
    let out = mwlab_cli::run(&config);
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", out.report);
    let _ = stdout.flush();
    std::process::exit(out.exit_code);
}
