fn main() {
    std::process::exit(polyconvex_tools::cli::run(std::env::args_os()));
}
