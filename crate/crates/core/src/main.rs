fn main() {
    std::process::exit(chiraforce::cli::main_with_args(std::env::args_os()));
}
