fn main() {
    std::process::exit(qwalk2d::cli::run(std::env::args_os()));
}
