fn main() {
    std::process::exit(torus_nls::cli::main_with_args(std::env::args_os()));
}
