fn main() {
    std::process::exit(qalu::cli::run(std::env::args_os()));
}
