fn main() {
    std::process::exit(chiraltopo::cli::main());
}
