fn main() {
    std::process::exit(signdeg_cli::run(std::env::args_os()));
}
