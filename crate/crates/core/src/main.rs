fn main() {
    std::process::exit(ionbounds::cli::run(std::env::args_os()));
}
