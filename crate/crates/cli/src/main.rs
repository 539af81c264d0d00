//! `gmplan`: enumerate quartic fewnomials, compute connection features,
//! label edges, train scorers and schedule edge searches.

mod config;
mod data;
mod features;
mod model;
mod search;
mod stores;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use stores::Ctx;

/// Exit status of a search that exhausted its edges.
pub const EXIT_FAIL: u8 = 1;
/// Exit status of operational errors.
pub const EXIT_ERROR: u8 = 2;
/// Exit status of a search stopped by `--max-attempts`.
pub const EXIT_INTERRUPTED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "gmplan", version, about = "Plan period computations across pencils of quartic surfaces")]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Store directory; overrides `data_dir`.
    #[arg(long, global = true)]
    dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smooth quartics with `k` unit monomials.
    Enumerate(data::EnumerateArgs),
    /// S4 orbits of a vertex store.
    Orbits(data::OrbitsArgs),
    /// Candidate edges under a policy.
    Edges(data::EdgesArgs),
    /// Connection matrices and feature records.
    Gm(features::GmArgs),
    /// Time-limited Picard-Fuchs labels.
    Label(features::LabelArgs),
    /// Principal components of edge vectors.
    Pca(features::PcaArgs),
    /// Train a scorer.
    Train(model::TrainArgs),
    /// Score edges, optionally keeping the top few per source vertex.
    Predict(model::PredictArgs),
    /// ROC curve of a model on its held-out edges.
    Roc(model::RocArgs),
    /// Edge search connecting target vertices.
    Search(search::SearchArgs),
    /// Summaries of searches and success-frequency tables.
    Report(search::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", chain(&e));
            ExitCode::from(EXIT_ERROR)
        }
    }
}

/// Causes joined by `: `, skipping any already quoted by the message before.
fn chain(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let mut config = Config::load(cli.config.as_deref())?;
    if let Some(d) = cli.dir {
        config.data_dir = d;
    }
    let ctx = Ctx::new(config, std::env::args().skip(1).collect());
    match cli.command {
        Command::Enumerate(a) => data::enumerate(&ctx, a),
        Command::Orbits(a) => data::orbits(&ctx, a),
        Command::Edges(a) => data::edges(&ctx, a),
        Command::Gm(a) => features::gm(&ctx, a),
        Command::Label(a) => features::label(&ctx, a),
        Command::Pca(a) => features::pca(&ctx, a),
        Command::Train(a) => model::train(&ctx, a),
        Command::Predict(a) => model::predict(&ctx, a),
        Command::Roc(a) => model::roc(&ctx, a),
        Command::Search(a) => search::search(&ctx, a),
        Command::Report(a) => search::report(&ctx, a),
    }
}
