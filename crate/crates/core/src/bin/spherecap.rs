fn main() {
    std::process::exit(spherecap::cli::run(std::env::args_os()));
}
