fn main() {
    std::process::exit(gms_core::cli::run(std::env::args_os()));
}
