fn main() {
    std::process::exit(hypogram::cli::run(std::env::args_os()));
}
