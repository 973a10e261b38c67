fn main() {
    std::process::exit(gridenc::cli::run(std::env::args_os()));
}
