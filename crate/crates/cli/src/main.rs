fn main() {
    std::process::exit(tfd_cli::run(std::env::args_os()));
}
