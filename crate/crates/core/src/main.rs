fn main() {
    besovclaw::fields::init_thread_pool_from_env();
    std::process::exit(besovclaw::cli::run(std::env::args_os()));
}
