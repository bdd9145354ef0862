fn main() {
    std::process::exit(screening::cli::main_with(std::env::args_os()));
}
