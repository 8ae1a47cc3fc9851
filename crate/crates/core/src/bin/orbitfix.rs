fn main() {
    std::process::exit(orbitfix::cli::main_with_args(std::env::args_os()));
}
