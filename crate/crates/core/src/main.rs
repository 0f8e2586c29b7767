fn main() {
    std::process::exit(mmv::harness::cli::run_cli(std::env::args_os()));
}
