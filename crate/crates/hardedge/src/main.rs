fn main() {
    std::process::exit(hardedge::run(std::env::args_os()));
}
