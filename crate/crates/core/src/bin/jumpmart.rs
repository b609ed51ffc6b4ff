fn main() {
    std::process::exit(jumpmart::cli::run(std::env::args_os()));
}
