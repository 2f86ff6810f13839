fn main() {
    std::process::exit(asqlab_core::cli::run(std::env::args_os()));
}
