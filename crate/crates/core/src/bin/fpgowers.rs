fn main() {
    std::process::exit(fpgowers::cli::run());
}
