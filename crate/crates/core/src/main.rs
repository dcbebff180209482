fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let seed = std::env::var(swarmkit::cli::SEED_ENV).ok();
    std::process::exit(swarmkit::cli::main_with(std::env::args_os(), seed.as_deref()));
}
