fn main() {
    std::process::exit(blindsweep::cli::run_cli());
}
