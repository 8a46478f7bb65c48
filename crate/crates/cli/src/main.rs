fn main() {
    std::process::exit(molfrag::run(std::env::args_os()));
}
