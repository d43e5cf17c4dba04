fn main() {
    std::process::exit(topoinfer::cli::run(std::env::args_os()));
}
