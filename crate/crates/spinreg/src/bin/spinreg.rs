fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = spinreg::cli::main_with_args(args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
