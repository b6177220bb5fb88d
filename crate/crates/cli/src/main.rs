fn main() {
    std::process::exit(atomflux_cli::run(std::env::args_os()));
}
