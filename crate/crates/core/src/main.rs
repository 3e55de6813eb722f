fn main() {
    std::process::exit(c1free::cli::run_cli(std::env::args_os()));
}
