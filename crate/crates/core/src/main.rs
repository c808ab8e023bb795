fn main() {
    std::process::exit(dqc1bench::cli::run_cli(std::env::args_os()));
}
