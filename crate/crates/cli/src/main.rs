fn main() {
    std::process::exit(wconsensus_cli::run_cli(std::env::args_os()));
}
