fn main() {
    std::process::exit(tam_core::cli::main_with_args(std::env::args_os()));
}
