fn main() {
    std::process::exit(cokplex::cli::run(std::env::args_os()));
}
