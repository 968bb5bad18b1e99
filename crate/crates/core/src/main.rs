fn main() {
    std::process::exit(rhombs::cli::run(std::env::args_os()));
}
