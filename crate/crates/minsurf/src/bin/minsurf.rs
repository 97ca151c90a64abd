fn main() {
    std::process::exit(minsurf::cli::run());
}
