fn main() {
    std::process::exit(icregime::cli::main_with_args(std::env::args_os()));
}
