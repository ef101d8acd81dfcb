fn main() {
    std::process::exit(cayley_lab::cli::run(std::env::args_os()));
}
