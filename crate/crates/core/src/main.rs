fn main() {
    std::process::exit(deformed_divergence::cli::main_with_args(std::env::args_os()));
}
