use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let (code, out) = floercable::cli_io::run(&args);
    if code == 0 {
        print!("{out}");
    } else {
        let _ = write!(std::io::stderr(), "{out}");
    }
    std::process::exit(code);
}
