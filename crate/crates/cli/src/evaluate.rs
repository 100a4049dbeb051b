use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use monophily::classify::{parse_methods, Features};
use monophily::eval::{run_experiment, ExperimentConfig};

use crate::common::{emit, parse_fractions, GraphArgs, ManifestDraft, OutputDir};
use crate::null_sample::histograms;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Experiment configuration as JSON; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated methods: baseline, mv1, mv2, zgl, link_lr, link_nb.
    #[arg(long)]
    pub methods: Option<String>,
    /// Label percentages as `lo:hi:step`, or a comma list.
    #[arg(long)]
    pub fractions: Option<String>,
    /// Random splits per label fraction (default 10).
    #[arg(long)]
    pub folds: Option<usize>,
    /// Master seed for split sampling (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Class encoded +1; defaults to the lexicographically first label.
    #[arg(long)]
    pub positive: Option<String>,
    /// Adjacency side used as features on directed graphs: `out` or `in`.
    #[arg(long)]
    pub features: Option<Features>,
    /// Inverse regularization strength of LINK logistic regression.
    #[arg(long)]
    pub gain: Option<f64>,
    /// Use the sparse approximation of LINK Naive Bayes.
    #[arg(long)]
    pub nb_sparse: bool,
    /// Also record the one-vs-rest AUC of each class.
    #[arg(long)]
    pub per_class_auc: bool,
    /// Also write null preference histograms with this many replicates.
    #[arg(long)]
    pub null_sample: Option<usize>,
    /// Output directory for `report.json`, `report.csv` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

/// Flag over file over default.
pub fn resolve_config(args: &EvaluateArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing experiment config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(m) = &args.methods {
        config.methods = parse_methods(m)?;
    }
    if let Some(f) = &args.fractions {
        config.label_fractions = parse_fractions(f)?;
    }
    if let Some(folds) = args.folds {
        config.folds = folds;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(p) = &args.positive {
        config.positive_class = Some(p.clone());
    }
    if let Some(f) = args.features {
        config.classifier.features = f;
    }
    if let Some(c) = args.gain {
        config.classifier.link_gain = c;
    }
    if args.nb_sparse {
        config.classifier.nb_sparse = true;
    }
    if args.per_class_auc {
        config.per_class_auc = true;
    }
    config.validate()?;
    Ok(config)
}

/// Returns whether every fold of every method completed.
pub fn run(args: &EvaluateArgs) -> Result<bool> {
    let config = resolve_config(args)?;
    let sources = args.graph.sources()?;
    let mut inputs = args.graph.input_paths(&sources);
    inputs.extend(args.config.clone());
    let draft = ManifestDraft::new(
        "evaluate",
        Some(config.seed),
        serde_json::json!({
            "experiment": config,
            "directed": args.graph.directed,
            "raw": args.graph.raw,
            "null_sample": args.null_sample,
        }),
        &inputs,
    )?;

    let mut reports = Vec::new();
    let mut nulls = Vec::new();
    for (i, src) in sources.iter().enumerate() {
        let loaded = args.graph.load(src)?;
        let report = run_experiment(&loaded.graph, &loaded.id, &config)
            .with_context(|| format!("evaluating {}", loaded.id))?;
        for w in &report.warnings {
            eprintln!("warning: {}: {w}", loaded.id);
        }
        if let Some(reps) = args.null_sample {
            nulls.extend(histograms(&loaded.id, i, &loaded.graph, None, reps, 20, config.seed));
        }
        reports.push(report);
    }

    let mut csv = String::new();
    for (i, r) in reports.iter().enumerate() {
        let body = r.to_csv();
        csv.push_str(if i == 0 { &body } else { body.split_once('\n').map_or("", |x| x.1) });
    }
    let mut out = OutputDir::create(&args.out)?;
    out.write_json("report.json", &reports)?;
    out.write("report.csv", csv.as_bytes())?;
    if args.null_sample.is_some() {
        out.write_json("null_sample.json", &nulls)?;
    }
    out.finish(draft)?;

    let complete = reports.iter().all(|r| r.complete);
    for r in &reports {
        for cell in &r.cells {
            let fmt = |x: Option<f64>| x.map_or("NA".to_string(), |v| format!("{v:.4}"));
            emit(&format!(
                "{}\t{}\t{}\tmean_auc={}\tstd={}\n",
                r.graph,
                cell.method,
                cell.fraction,
                fmt(cell.mean_auc),
                fmt(cell.std_auc)
            ))?;
        }
    }
    Ok(complete)
}
