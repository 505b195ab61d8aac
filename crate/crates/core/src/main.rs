fn main() {
    std::process::exit(hbs_noc::cli::main_with_args(std::env::args_os()));
}
