fn main() {
    std::process::exit(rmom::cli::main_with_args(std::env::args_os()));
}
