fn main() {
    std::process::exit(urllc_pilot::cli::run(std::env::args()));
}
