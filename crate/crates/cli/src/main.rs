fn main() {
    std::process::exit(casimir_cli::run(std::env::args_os()));
}
