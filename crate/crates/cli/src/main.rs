//! Command-line front end for the decentralization measurement pipeline.
//!
//! Subcommands mirror the pipeline stages: `count` tallies a block
//! stream, `power` ranks accumulated vote weight from a ledger snapshot,
//! `allocate` re-attributes blocks to stakeholders, and `entropy`
//! compares distributions. `fixture` exposes the built-in reference
//! datasets. Data goes to stdout, diagnostics to stderr, and every run is
//! deterministic given its flags and input bytes.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{OutputFormat, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "stakescope",
    version,
    about = "Measure how decentralized block production is in PoW and DPoS chains"
)]
struct Cli {
    /// Output format: table, csv or json
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Optional TOML config mirroring the flags (flags win)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count blocks per generator in a block stream
    Count {
        /// Block stream CSV with header height,generator,timestamp
        blocks: PathBuf,
        /// Show only the top N generators
        #[arg(long)]
        top: Option<usize>,
    },
    /// Rank accumulated vote weight from a ledger snapshot
    Power {
        /// Ledger snapshot JSON
        snapshot: PathBuf,
        /// Weight basis: stakeholder (votes cast) or witness (votes received)
        #[arg(long)]
        basis: Option<String>,
        /// Proxy-chain hops to follow, 1..=4
        #[arg(long)]
        proxy_depth: Option<usize>,
        /// Show only the top N accounts
        #[arg(long)]
        top: Option<usize>,
        /// Also seat the 21-member witness schedule
        #[arg(long)]
        elect: bool,
        /// Seed for the random 21st seat (default 42)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-allocate counted blocks to stakeholders by vote weight
    Allocate {
        /// Ledger snapshot JSON
        snapshot: PathBuf,
        /// Block stream CSV
        blocks: PathBuf,
        /// Allocation mode: global-proportional or per-witness-split
        #[arg(long)]
        mode: Option<String>,
        /// Proxy-chain hops to follow, 1..=4
        #[arg(long)]
        proxy_depth: Option<usize>,
        /// Show only the top N stakeholders
        #[arg(long)]
        top: Option<usize>,
    },
    /// Shannon entropy and normalized comparison of distributions
    Entropy {
        /// Series sources: a CSV path (header id,value) or fixture:NAME
        #[arg(long = "series", required = true, num_args = 1..)]
        series: Vec<String>,
        /// Entropy ranges, e.g. 10,20,30
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<usize>>,
    },
    /// Built-in reference datasets
    Fixture {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    /// List the available fixtures
    List,
    /// Print one fixture's entries and quoted aggregates
    Show { name: String },
}

fn run(cli: Cli) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    let mut overrides = Overrides {
        format: cli.format,
        ..Overrides::default()
    };

    match cli.command {
        Command::Count { blocks, top } => {
            overrides.top = top;
            let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
            commands::cmd_count(&mut out, &blocks, &config)
        }
        Command::Power {
            snapshot,
            basis,
            proxy_depth,
            top,
            elect,
            seed,
        } => {
            overrides.basis = basis;
            overrides.proxy_depth = proxy_depth;
            overrides.top = top;
            overrides.seed = seed;
            let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
            commands::cmd_power(&mut out, &snapshot, elect, &config)
        }
        Command::Allocate {
            snapshot,
            blocks,
            mode,
            proxy_depth,
            top,
        } => {
            overrides.mode = mode;
            overrides.proxy_depth = proxy_depth;
            overrides.top = top;
            let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
            commands::cmd_allocate(&mut out, &snapshot, &blocks, &config)
        }
        Command::Entropy { series, r } => {
            overrides.r_values = r;
            let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
            commands::cmd_entropy(&mut out, &series, &config)
        }
        Command::Fixture { action } => {
            let config = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
            match action {
                FixtureAction::List => commands::cmd_fixture_list(&mut out, &config),
                FixtureAction::Show { name } => {
                    commands::cmd_fixture_show(&mut out, &name, &config)
                }
            }
        }
    }?;
    out.flush()?;
    Ok(())
}

/// A consumer like `head` closing stdout early is not an error.
fn is_broken_pipe(error: &anyhow::Error) -> bool {
    use std::io::ErrorKind::BrokenPipe;
    error.chain().any(|cause| {
        if let Some(io) = cause.downcast_ref::<std::io::Error>() {
            return io.kind() == BrokenPipe;
        }
        if let Some(json) = cause.downcast_ref::<serde_json::Error>() {
            return json.io_error_kind() == Some(BrokenPipe);
        }
        if let Some(csv_error) = cause.downcast_ref::<csv::Error>() {
            if let csv::ErrorKind::Io(io) = csv_error.kind() {
                return io.kind() == BrokenPipe;
            }
        }
        false
    })
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        if is_broken_pipe(&error) {
            return;
        }
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
