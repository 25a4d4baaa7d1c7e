use std::io::Write;

fn main() {
    let out = qconc::cli::run(std::env::args().skip(1));
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
