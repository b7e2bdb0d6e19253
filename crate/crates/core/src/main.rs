fn main() {
    std::process::exit(dualris::cli::main_with(std::env::args_os()));
}
