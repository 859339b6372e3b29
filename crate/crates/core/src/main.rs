fn main() {
    let code = integral_verify::cli::run_cli(std::env::args_os());
    std::process::exit(code);
}
