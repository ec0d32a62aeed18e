fn main() {
    std::process::exit(sfvg_core::cli::run(std::env::args_os()));
}
