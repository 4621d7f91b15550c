fn main() {
    std::process::exit(lebesgue_core::cli::run(std::env::args_os()));
}
