fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("LCSAMP_LOG")).init();
    std::process::exit(lcsamp::cli::main_with_args(std::env::args_os()));
}
