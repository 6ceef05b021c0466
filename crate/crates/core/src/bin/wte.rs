fn main() {
    std::process::exit(wte::cli::main_with_args(std::env::args_os()));
}
