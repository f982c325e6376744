fn main() {
    std::process::exit(catbell::cli::run(std::env::args().collect()));
}
