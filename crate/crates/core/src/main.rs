fn main() {
    std::process::exit(forid::cli::main());
}
