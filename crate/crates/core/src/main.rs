fn main() {
    std::process::exit(odd_lefschetz::cli::run(std::env::args_os()));
}
