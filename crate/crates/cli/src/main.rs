fn main() -> std::process::ExitCode {
    astsm_cli::app::main_with_args(std::env::args_os())
}
