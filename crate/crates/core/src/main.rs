fn main() {
    std::process::exit(trigraph::cli::run(std::env::args_os()));
}
