fn main() {
    std::process::exit(ewasim::cli::run());
}
