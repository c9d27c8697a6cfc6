fn main() {
    std::process::exit(henonlab::cli::main_with_args(std::env::args_os()));
}
