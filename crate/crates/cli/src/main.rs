//! `monophily` command-line tool.

mod classify;
mod common;
mod evaluate;
mod fit;
mod generate;
mod null_sample;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "monophily", version, about = "Homophily and monophily analysis of labeled graphs")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "MONOPHILY_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate homophily and overdispersion per class.
    Fit(fit::FitArgs),
    /// Sample a graph from an overdispersed stochastic block model.
    Generate(generate::GenerateArgs),
    /// Score hidden labels on one random split.
    Classify(classify::ClassifyArgs),
    /// Cross-validated AUC curves over label fractions.
    Evaluate(evaluate::EvaluateArgs),
    /// Observed and binomial-null preference histograms.
    NullSample(null_sample::NullSampleArgs),
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Fit(a) => fit::run(a),
        Command::Generate(a) => generate::run(a).map(|_| true),
        Command::Classify(a) => classify::run(a).map(|_| true),
        Command::Evaluate(a) => evaluate::run(a),
        Command::NullSample(a) => null_sample::run(a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some results are missing; see the warnings above");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
