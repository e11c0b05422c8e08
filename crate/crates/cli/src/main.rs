fn main() {
    std::process::exit(katokit_cli::run(std::env::args_os()));
}
