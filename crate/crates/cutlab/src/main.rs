fn main() {
    std::process::exit(cutlab::main_with_args(std::env::args_os()));
}
