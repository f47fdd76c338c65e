use std::io;
use std::panic;

fn main() {
    let code = panic::catch_unwind(|| nts_cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr()))
        .unwrap_or(3);
    std::process::exit(code);
}
