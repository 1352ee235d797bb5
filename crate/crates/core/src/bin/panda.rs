fn main() {
    std::process::exit(panda::cli::main_with(std::env::args_os()));
}
