fn main() {
    std::process::exit(clpp::cli::main_with_args(std::env::args_os()));
}
