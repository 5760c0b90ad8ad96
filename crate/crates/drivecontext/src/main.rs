fn main() {
    std::process::exit(drivecontext::cli::main());
}
