fn main() {
    std::process::exit(shapelab_cli::run_cli(std::env::args_os()));
}
