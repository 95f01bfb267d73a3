fn main() {
    std::process::exit(rlw_core::cli::main());
}
