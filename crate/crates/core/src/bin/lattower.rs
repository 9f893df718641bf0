fn main() {
    std::process::exit(lattower::cli::main_with_args(std::env::args_os()));
}
