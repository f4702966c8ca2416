fn main() {
    std::process::exit(nptest::cli::run(std::env::args_os()));
}
