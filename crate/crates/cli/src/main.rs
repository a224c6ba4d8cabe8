fn main() {
    std::process::exit(wsmorse_cli::run(std::env::args_os()));
}
