fn main() {
    std::process::exit(kplane::cli::run(std::env::args_os()));
}
