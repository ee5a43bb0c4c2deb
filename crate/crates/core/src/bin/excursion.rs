fn main() {
    std::process::exit(excursions::cli::main_with_args(std::env::args_os()));
}
