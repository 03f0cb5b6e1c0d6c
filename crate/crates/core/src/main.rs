fn main() {
    std::process::exit(workbench::cli::main_with(std::env::args_os()));
}
