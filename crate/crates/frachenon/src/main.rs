fn main() {
    frachenon::cli::init_logging();
    std::process::exit(frachenon::cli::run());
}
