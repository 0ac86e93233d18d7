use clap::Parser;
use guaranteed_ivp::cli::{run, CliArgs};

fn main() {
    std::process::exit(run(CliArgs::parse()));
}
