// SPDX-License-Identifier: Apache-2.0

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tlss_cli::commands::{self, RunOptions};

/// Two-level threshold secret sharing and a consortium chain simulator.
#[derive(Parser)]
#[command(name = "tlss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate a worked example and check it against the expected tables.
    PaperExample {
        /// 1 or 2.
        which: u8,
    },
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Exit 0 even when the protocol aborts.
        #[arg(long)]
        allow_abort: bool,
        /// Print secrets and write the private transcript view.
        #[arg(long)]
        reveal: bool,
    },
    /// Validate a persisted chain and list its blocks.
    ChainInspect { store: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::PaperExample { which } => commands::paper_example(which, &mut out, &mut err),
        Command::Run {
            config,
            allow_abort,
            reveal,
        } => commands::run(
            &config,
            &RunOptions {
                allow_abort,
                reveal,
            },
            &mut out,
            &mut err,
        ),
        Command::ChainInspect { store } => commands::chain_inspect(&store, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
