fn main() {
    std::process::exit(ndspressure_cli::cli::run(std::env::args_os()));
}
