fn main() {
    std::process::exit(spin_soliton::cli::cli_main(std::env::args_os()));
}
