fn main() {
    std::process::exit(ising_ebic::cli::run_from_args(std::env::args_os()));
}
