fn main() {
    std::process::exit(equivtest_cli::run(std::env::args_os()));
}
