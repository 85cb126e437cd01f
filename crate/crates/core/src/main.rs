fn main() -> std::process::ExitCode {
    wknot::cli::main()
}
