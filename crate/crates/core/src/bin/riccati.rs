fn main() {
    std::process::exit(riccati_synth::cli::run(std::env::args_os()));
}
