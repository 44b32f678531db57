fn main() {
    std::process::exit(stirap::cli::main_with_args(std::env::args_os()));
}
