fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(helios::cli::run(args));
}
