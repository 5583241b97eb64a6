use std::io::Write;

fn main() {
    let out = hsolv::cli::run(std::env::args_os());
    if !out.output.is_empty() {
        let _ = std::io::stdout().write_all(out.output.as_bytes());
    }
    if !out.diagnostics.is_empty() {
        let _ = std::io::stderr().write_all(out.diagnostics.as_bytes());
    }
    std::process::exit(out.code);
}
