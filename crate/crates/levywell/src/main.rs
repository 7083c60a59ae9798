fn main() {
    std::process::exit(levywell::cli::run(std::env::args_os()));
}
