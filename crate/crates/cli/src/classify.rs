use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use monophily::classify::{parse_methods, score, ClassifierOptions, Features, Method};
use monophily::eval::{auc, sample_split, split_hash};
use monophily::ClassId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::common::{emit, GraphArgs, ManifestDraft, OutputDir};

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Comma-separated methods: baseline, mv1, mv2, zgl, link_lr, link_nb.
    #[arg(long, default_value = "baseline,mv1,mv2,zgl,link_lr,link_nb")]
    pub methods: String,
    /// Fraction of labeled nodes whose labels are revealed.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    /// Seed for the split.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Class encoded +1; defaults to the lexicographically first label.
    #[arg(long)]
    pub positive: Option<String>,
    /// Adjacency side used as features on directed graphs: `out` or `in`.
    #[arg(long, default_value = "out")]
    pub features: Features,
    /// Inverse regularization strength of LINK logistic regression.
    #[arg(long, default_value_t = 1e6)]
    pub gain: f64,
    /// Use the sparse approximation of LINK Naive Bayes.
    #[arg(long)]
    pub nb_sparse: bool,
    /// Output directory for `scores.csv` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &ClassifyArgs) -> Result<()> {
    if args.graph.batch.is_some() {
        bail!("classify takes a single graph");
    }
    let methods: Vec<Method> = parse_methods(&args.methods)?;
    let opts = ClassifierOptions {
        link_gain: args.gain,
        features: args.features,
        nb_sparse: args.nb_sparse,
        ..Default::default()
    };
    let sources = args.graph.sources()?;
    let draft = ManifestDraft::new(
        "classify",
        Some(args.seed),
        json!({
            "methods": methods,
            "fraction": args.fraction,
            "positive": args.positive,
            "classifier": opts,
            "directed": args.graph.directed,
            "raw": args.graph.raw,
        }),
        &args.graph.input_paths(&sources),
    )?;
    let loaded = args.graph.load(&sources[0])?;
    let g = &loaded.graph;
    let positive = match &args.positive {
        Some(name) => g
            .dict()
            .lookup(name)
            .with_context(|| format!("--positive {name:?} is not a label of the graph"))?,
        None => ClassId(0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let split = sample_split(g, args.fraction, positive, &mut rng)?;

    let mut csv = String::from("node_id,method,score,fallback_flag\n");
    let mut summary = Vec::new();
    for &m in &methods {
        let sv = score(m, g, &split, &opts).with_context(|| format!("scoring with {m}"))?;
        for ((&u, &x), &fb) in sv.nodes.iter().zip(&sv.scores).zip(&sv.fallback) {
            csv.push_str(&format!("{},{},{},{}\n", g.source_id(u), m, x, u8::from(fb)));
        }
        summary.push(json!({
            "method": m,
            "auc": auc(&sv, g, &split)?,
            "high_score_favors": g.dict().name(sv.high_class(&split)),
            "fallback_count": sv.fallback_count(),
            "converged": sv.converged,
        }));
    }
    let mut out = OutputDir::create(&args.out)?;
    out.write("scores.csv", csv.as_bytes())?;
    out.finish(draft)?;
    emit(&format!(
        "{}\n",
        serde_json::to_string_pretty(&json!({
            "graph": loaded.id,
            "split_hash": split_hash(g, &split),
            "train_size": split.train.len(),
            "test_size": split.test.len(),
            "methods": summary,
        }))?
    ))?;
    Ok(())
}
