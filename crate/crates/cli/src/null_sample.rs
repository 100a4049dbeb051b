use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use monophily::graph::class_degree_sequence;
use monophily::stats::{observed_ratios, sample_null_preferences, Histogram};
use monophily::{LabeledGraph, Orientation};
use serde::Serialize;
use serde_json::json;

use crate::common::{substream_seed, GraphArgs, ManifestDraft, OutputDir};

#[derive(Debug, Args)]
pub struct NullSampleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Edge side counted as a node's degree: `undirected`, `out` or `in`.
    #[arg(long)]
    pub orientation: Option<Orientation>,
    /// Null replicates per node.
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    /// Equal-width histogram bins over [0, 1].
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    /// Master seed; each graph and class draws from its own substream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for `null_sample.json` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct ClassHistograms {
    pub graph: String,
    pub class: String,
    pub h_hat: Option<f64>,
    pub seed: u64,
    pub replicates: usize,
    pub observed: Option<Histogram>,
    pub null: Option<Histogram>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Observed and binomial-null preference histograms for every class.
/// Class `k` of graph `j` draws from substream `j · 2¹⁶ + k` of `seed`.
pub fn histograms(
    id: &str,
    graph_index: usize,
    g: &LabeledGraph,
    orientation: Option<Orientation>,
    replicates: usize,
    bins: usize,
    seed: u64,
) -> Vec<ClassHistograms> {
    let orientation = orientation.unwrap_or(if g.is_directed() {
        Orientation::Out
    } else {
        Orientation::Undirected
    });
    g.dict()
        .classes()
        .filter(|&c| g.class_size(c) > 0)
        .map(|class| {
            let sub = substream_seed(seed, "null-sample", ((graph_index as u64) << 16) | class.0 as u64);
            let outcome = class_degree_sequence(g, class, orientation).and_then(|seq| {
                let null = sample_null_preferences(&seq, replicates, sub)?;
                Ok((observed_ratios(&seq), null))
            });
            let mut h = ClassHistograms {
                graph: id.to_string(),
                class: g.dict().name(class).to_string(),
                h_hat: None,
                seed: sub,
                replicates,
                observed: None,
                null: None,
                error: None,
            };
            match outcome {
                Ok((obs, null)) => {
                    h.h_hat = Some(null.h_hat);
                    h.observed = Some(Histogram::unit_interval(&obs, bins));
                    h.null = Some(Histogram::unit_interval(&null.samples, bins));
                }
                Err(e) => h.error = Some(e.to_string()),
            }
            h
        })
        .collect()
}

pub fn run(args: &NullSampleArgs) -> Result<()> {
    let sources = args.graph.sources()?;
    let draft = ManifestDraft::new(
        "null-sample",
        Some(args.seed),
        json!({
            "orientation": args.orientation,
            "replicates": args.replicates,
            "bins": args.bins,
            "directed": args.graph.directed,
            "raw": args.graph.raw,
        }),
        &args.graph.input_paths(&sources),
    )?;
    let mut all = Vec::new();
    for (i, src) in sources.iter().enumerate() {
        let loaded = args.graph.load(src)?;
        all.extend(histograms(
            &loaded.id,
            i,
            &loaded.graph,
            args.orientation,
            args.replicates,
            args.bins,
            args.seed,
        ));
    }
    let mut out = OutputDir::create(&args.out)?;
    out.write_json("null_sample.json", &all)?;
    out.finish(draft)?;
    Ok(())
}
