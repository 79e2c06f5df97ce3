fn main() {
    std::process::exit(ttool::run(std::env::args_os()));
}
