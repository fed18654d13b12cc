fn main() {
    std::process::exit(nmr_vqe::cli::main());
}
