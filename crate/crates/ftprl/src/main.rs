fn main() {
    std::process::exit(ftprl::cli::run_cli(std::env::args_os()));
}
