fn main() {
    std::process::exit(hyperglue::run(std::env::args_os()));
}
