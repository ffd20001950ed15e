fn main() {
    std::process::exit(dca_core::cli::run());
}
