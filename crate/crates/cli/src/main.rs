fn main() {
    let outcome = heegner_cli::run_from_args(std::env::args_os());
    std::process::exit(outcome.code);
}
