fn main() {
    env_logger::init();
    let code = besov_embeddings::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
