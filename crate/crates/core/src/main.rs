fn main() {
    std::process::exit(prunelab::harness::cli::run());
}
