fn main() {
    std::process::exit(multiphoton::cli::run(std::env::args_os()));
}
