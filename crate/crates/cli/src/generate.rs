use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use monophily::graph::{class_degree_sequence, largest_connected_component};
use monophily::io::{write_edge_list, write_labels};
use monophily::osbm::{sample_osbm, OsbmConfig, Rates};
use monophily::stats::{fit_williams, WilliamsOptions};
use monophily::Orientation;
use serde::Serialize;

use crate::common::{emit, ManifestDraft, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// No homophily and no monophily.
    None,
    /// Monophily without homophily.
    Monophily,
    /// Homophily without monophily.
    Homophily,
    /// Both homophily and monophily.
    Both,
}

impl Preset {
    pub fn config(self) -> OsbmConfig {
        let (lambda, phi) = match self {
            Preset::None => (1.0, 0.0),
            Preset::Monophily => (1.0, 0.2),
            Preset::Homophily => (1.5, 0.0),
            Preset::Both => (1.5, 0.2),
        };
        OsbmConfig {
            blocks: vec![1000, 1000],
            rates: Rates::MeanDegree { lambda, mean_degree: 40.0 },
            phi_in: phi,
            phi_out: phi,
            seed: 0,
            allow_self_loops: false,
            labels: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator configuration as JSON.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in two-block regime with 1000 nodes per block and mean degree 40.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for `edges.tsv`, `labels.csv` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct ClassSummary {
    class: String,
    size: usize,
    h_hat: Option<f64>,
    phi_hat: Option<f64>,
    significant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Summary {
    nodes: usize,
    edges: usize,
    mean_degree: f64,
    p_in: f64,
    p_out: f64,
    largest_component: usize,
    classes: Vec<ClassSummary>,
    warnings: Vec<String>,
}

pub fn resolve_config(args: &GenerateArgs) -> Result<OsbmConfig> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<OsbmConfig>(&text)
                .with_context(|| format!("parsing generator config {}", path.display()))?
        }
        (None, Some(p)) => p.config(),
        (None, None) => bail!("either --config or --preset is required"),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

pub fn run(args: &GenerateArgs) -> Result<()> {
    let config = resolve_config(args)?;
    let inputs: Vec<PathBuf> = args.config.iter().cloned().collect();
    let draft = ManifestDraft::new(
        "generate",
        Some(config.seed),
        serde_json::to_value(&config)?,
        &inputs,
    )?;
    let sample = sample_osbm(&config).context("invalid generator configuration")?;
    let g = &sample.graph;

    let mut out = OutputDir::create(&args.out)?;
    let mut edges = Vec::new();
    write_edge_list(g, &mut edges)?;
    out.write("edges.tsv", &edges)?;
    let mut labels = Vec::new();
    write_labels(g, &mut labels)?;
    out.write("labels.csv", &labels)?;

    let lcc = largest_connected_component(g)?;
    let classes = g
        .dict()
        .classes()
        .map(|class| {
            let fit = class_degree_sequence(g, class, Orientation::Undirected)
                .and_then(|seq| fit_williams(&seq, &WilliamsOptions::default()));
            match fit {
                Ok(f) => ClassSummary {
                    class: g.dict().name(class).to_string(),
                    size: g.class_size(class),
                    h_hat: Some(f.initial.h_hat),
                    phi_hat: Some(f.phi_hat),
                    significant: Some(f.significant),
                    error: None,
                },
                Err(e) => ClassSummary {
                    class: g.dict().name(class).to_string(),
                    size: g.class_size(class),
                    h_hat: None,
                    phi_hat: None,
                    significant: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let summary = Summary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        mean_degree: 2.0 * g.edge_count() as f64 / g.node_count() as f64,
        p_in: sample.rates.p_in,
        p_out: sample.rates.p_out,
        largest_component: lcc.node_count(),
        classes,
        warnings: sample.warnings.clone(),
    };
    for w in &sample.warnings {
        eprintln!("warning: {w}");
    }
    out.finish(draft)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&summary)?))?;
    Ok(())
}
