fn main() { std::process::exit(disslab::cli::main()) }
