use std::io::Write;

fn main() {
    let mut out = std::io::stdout().lock();
    let code = welfare_cli::run(std::env::args_os(), &mut out, &mut std::io::stderr().lock());
    let _ = out.flush();
    std::process::exit(code);
}
