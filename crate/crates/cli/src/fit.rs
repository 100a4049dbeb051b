use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use monophily::graph::class_degree_sequence;
use monophily::stats::{fit_williams, WilliamsOptions};
use monophily::Orientation;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::common::{emit, GraphArgs, ManifestDraft, OutputDir};

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Degree orientation: `undirected`, `in` or `out`. Directed graphs
    /// default to `out`.
    #[arg(long)]
    pub orientation: Option<Orientation>,
    /// Significance level of the overdispersion test.
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    /// Cap on overdispersion refinement iterations.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Relative tolerance between the weighted statistic and its degrees of freedom.
    #[arg(long, default_value_t = 1e-4)]
    pub closeness: f64,
    /// Output directory for `fits.jsonl` and `manifest.json`; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct FitLine {
    graph: String,
    orientation: Orientation,
    class: String,
    #[serde(flatten)]
    fit: Option<FitFields>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct FitFields {
    h_hat: f64,
    beta0_mle: f64,
    beta0_mqe: f64,
    phi_hat: f64,
    x2: f64,
    dof: u64,
    p_value: f64,
    iterations: usize,
    converged: bool,
    significant: bool,
    clamped: bool,
    x2_final: f64,
    h_mqe: f64,
    n_used: usize,
    zero_degree_excluded: usize,
}

/// Returns whether every class of every graph was fitted.
pub fn run(args: &FitArgs) -> Result<bool> {
    let opts = WilliamsOptions {
        alpha: args.alpha,
        max_iter: args.max_iter,
        closeness: args.closeness,
    };
    let sources = args.graph.sources()?;
    let draft = ManifestDraft::new(
        "fit",
        None,
        json!({
            "orientation": args.orientation,
            "alpha": args.alpha,
            "max_iter": args.max_iter,
            "closeness": args.closeness,
            "directed": args.graph.directed,
            "format": args.graph.format,
            "raw": args.graph.raw,
        }),
        &args.graph.input_paths(&sources),
    )?;

    let per_graph: Vec<Result<Vec<FitLine>>> = sources
        .par_iter()
        .map(|src| {
            let loaded = args.graph.load(src)?;
            let g = &loaded.graph;
            let orientation = args.orientation.unwrap_or(if g.is_directed() {
                Orientation::Out
            } else {
                Orientation::Undirected
            });
            Ok(g.dict()
                .classes()
                .filter(|&c| g.class_size(c) > 0)
                .map(|class| {
                    let name = g.dict().name(class).to_string();
                    let outcome = class_degree_sequence(g, class, orientation)
                        .and_then(|seq| fit_williams(&seq, &opts));
                    let (fit, error) = match outcome {
                        Ok(f) => (
                            Some(FitFields {
                                h_hat: f.initial.h_hat,
                                beta0_mle: f.initial.beta0_mle,
                                beta0_mqe: f.beta0_mqe,
                                phi_hat: f.phi_hat,
                                x2: f.initial.x2,
                                dof: f.initial.dof,
                                p_value: f.initial.p_value,
                                iterations: f.iterations,
                                converged: f.converged,
                                significant: f.significant,
                                clamped: f.clamped,
                                x2_final: f.final_x2(),
                                h_mqe: f.h_mqe,
                                n_used: f.initial.n_used,
                                zero_degree_excluded: f.initial.zero_degree_excluded,
                            }),
                            None,
                        ),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    FitLine { graph: loaded.id.clone(), orientation, class: name, fit, error }
                })
                .collect())
        })
        .collect();

    let mut lines = Vec::new();
    for r in per_graph {
        lines.extend(r?);
    }
    let ok = lines.iter().all(|l| l.error.is_none());
    let mut text = String::new();
    for l in &lines {
        text.push_str(&serde_json::to_string(l)?);
        text.push('\n');
        if let Some(e) = &l.error {
            eprintln!("warning: {} class {}: {e}", l.graph, l.class);
        }
    }
    match &args.out {
        Some(dir) => {
            let mut out = OutputDir::create(dir)?;
            out.write("fits.jsonl", text.as_bytes())?;
            out.finish(draft)?;
        }
        None => emit(&text)?,
    }
    Ok(ok)
}
