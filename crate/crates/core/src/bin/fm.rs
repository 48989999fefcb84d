use clap::Parser;
use fm_core::cli::{run, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    let code = run(&cfg, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
