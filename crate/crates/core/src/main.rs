fn main() {
    std::process::exit(majlat::cli::main_with_args(std::env::args_os()));
}
