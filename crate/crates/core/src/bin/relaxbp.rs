fn main() {
    std::process::exit(relaxbp::cli::parse_and_dispatch(std::env::args_os()));
}
