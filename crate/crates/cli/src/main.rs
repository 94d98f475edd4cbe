fn main() {
    std::process::exit(fkk_cli::run_cli(std::env::args_os()));
}
