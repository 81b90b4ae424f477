fn main() {
    std::process::exit(hedgebench::cli::main_from(std::env::args_os()));
}
