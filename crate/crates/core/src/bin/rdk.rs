fn main() {
    std::process::exit(rdk::cli::main());
}
