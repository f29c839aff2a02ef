fn main() {
    std::process::exit(formation_service::cli::run(std::env::args_os()));
}
