fn main() {
    std::process::exit(cdfreg::cli::run(std::env::args_os()));
}
