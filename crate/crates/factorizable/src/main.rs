fn main() {
    std::process::exit(factorizable::cli::dispatch(std::env::args_os()));
}
