fn main() {
    std::process::exit(nsbm::cli::run(std::env::args_os()));
}
