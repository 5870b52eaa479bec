fn main() {
    std::process::exit(wmsketch::cli::run(std::env::args_os()));
}
