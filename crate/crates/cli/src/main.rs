fn main() {
    std::process::exit(twosource_cli::main_with_args(std::env::args_os().collect()));
}
