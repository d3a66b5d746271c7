use clap::Parser;

use condgraph_cli::Cli;

fn main() -> anyhow::Result<()> {
    condgraph_cli::run(Cli::parse())
}
