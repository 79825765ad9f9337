fn main() {
    std::process::exit(fracsub_cli::main_with_args(std::env::args_os()));
}
