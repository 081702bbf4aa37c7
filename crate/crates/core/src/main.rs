fn main() {
    std::process::exit(tspforge::cli::run(std::env::args_os()));
}
