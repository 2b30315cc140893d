fn main() {
    std::process::exit(tribeta::cli::main_with_args(std::env::args_os()));
}
