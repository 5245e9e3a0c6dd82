fn main() {
    std::process::exit(chainbound::commands::main_with_args(std::env::args_os()));
}
