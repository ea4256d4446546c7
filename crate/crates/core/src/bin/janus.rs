fn main() {
    janus_core::cli::main()
}
