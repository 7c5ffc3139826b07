fn main() {
    std::process::exit(hypersint::cli::run(std::env::args_os()));
}
