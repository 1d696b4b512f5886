fn main() {
    std::process::exit(readiness_core::cli::run(std::env::args_os()));
}
