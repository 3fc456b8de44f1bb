fn main() {
    std::process::exit(ergolab::cli::run());
}
