fn main() {
    std::process::exit(bellex_core::cli::main_with_args(std::env::args_os()));
}
