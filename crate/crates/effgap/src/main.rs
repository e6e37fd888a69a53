fn main() {
    std::process::exit(effgap::cli::main_with_args(std::env::args_os()));
}
