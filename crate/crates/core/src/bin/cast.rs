fn main() {
    std::process::exit(cast_core::cli::parse_and_dispatch(std::env::args_os()));
}
