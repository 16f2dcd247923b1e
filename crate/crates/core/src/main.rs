fn main() {
    std::process::exit(qwcavity::cli::run_command(std::env::args_os()));
}
