fn main() {
    std::process::exit(swsc::cli::run());
}
