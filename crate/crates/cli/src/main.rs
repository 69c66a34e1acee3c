use std::io::IsTerminal;

fn main() {
    let stdout = std::io::stdout();
    let color = stdout.is_terminal();
    let code = smartgraph_cli::run(std::env::args_os(), color, &mut stdout.lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
