fn main() {
    std::process::exit(conical::cli::main());
}
