fn main() {
    std::process::exit(hornlab::run(std::env::args_os()));
}
