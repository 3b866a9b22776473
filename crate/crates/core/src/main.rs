fn main() {
    std::process::exit(cvchannel::cli::run(std::env::args_os()));
}
