fn main() {
    std::process::exit(udn_handover::cli::main(std::env::args_os()));
}
