use std::io::{stderr, stdout};
use std::process::exit;

fn main() {
    let code = streamquant::cli::parse_and_dispatch(
        std::env::args(),
        &mut stdout().lock(),
        &mut stderr().lock(),
    );
    exit(code);
}
