fn main() {
    std::process::exit(volcol::cli::run());
}
