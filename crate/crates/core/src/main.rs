fn main() {
    std::process::exit(l1minimax::cli::run(std::env::args_os()));
}
