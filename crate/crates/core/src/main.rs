fn main() {
    std::process::exit(halfstrip::cli::run(std::env::args_os()));
}
