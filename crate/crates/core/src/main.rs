fn main() {
    std::process::exit(cookie_idla::cli::parse_and_dispatch(std::env::args_os()));
}
