fn main() {
    std::process::exit(wannier_stark::cli::main_entry());
}
