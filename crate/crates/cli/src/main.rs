fn main() {
    std::process::exit(robtnep_cli::run(std::env::args_os()));
}
