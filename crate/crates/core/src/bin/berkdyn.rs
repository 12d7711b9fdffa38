fn main() {
    // Filled in once the analysis layers exist; see src/cli.rs.
    eprintln!("berkdyn: CLI not wired up yet");
    std::process::exit(2);
}
