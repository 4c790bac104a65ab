fn main() -> std::process::ExitCode {
    chevron_core::cli::main()
}
