fn main() {
    std::process::exit(weylquant::cli::main_entry());
}
