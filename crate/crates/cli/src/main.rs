fn main() {
    std::process::exit(mahler_cli::main_with_stdio());
}
