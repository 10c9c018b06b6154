fn main() -> std::process::ExitCode {
    lzs_core::cli::main()
}
