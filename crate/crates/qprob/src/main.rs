fn main() {
    std::process::exit(qprob::cli::main_with_args(std::env::args_os()));
}
