fn main() {
    std::process::exit(sqc::cli::run(std::env::args_os()));
}
