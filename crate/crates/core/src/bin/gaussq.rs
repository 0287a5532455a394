fn main() {
    std::process::exit(gaussq::cli::run(std::env::args_os()));
}
