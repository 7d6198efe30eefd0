fn main() {
    std::process::exit(kgrs::main_with_args(std::env::args_os()));
}
