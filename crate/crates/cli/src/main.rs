fn main() {
    std::process::exit(degenspec_cli::run(std::env::args_os()));
}
