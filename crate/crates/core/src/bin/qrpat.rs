use std::io;
use std::process::ExitCode;

use qrpat::cli::{self, EXIT_USAGE};

fn main() -> ExitCode {
    match cli::thread_cap() {
        Ok(Some(n)) => {
            // Only fails if a pool was already installed.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(None) => {}
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    }
    let code = cli::run_from(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
