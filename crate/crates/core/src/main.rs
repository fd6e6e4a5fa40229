fn main() {
    std::process::exit(coxnet::cli::run(std::env::args_os()));
}
