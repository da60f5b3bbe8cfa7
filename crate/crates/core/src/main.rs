fn main() {
    std::process::exit(oddaxis::cli::main_with_args(std::env::args_os()));
}
