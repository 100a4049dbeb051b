use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{score, ClassifierOptions, Method};
use crate::error::{Error, Result};
use crate::graph::{ClassId, LabeledGraph};

use super::auc::{auc, per_class_auc};
use super::split::{sample_split, split_hash};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub label_fractions: Vec<f64>,
    pub folds: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Class encoded `+1`; the lexicographically first class when absent.
    pub positive_class: Option<String>,
    pub classifier: ClassifierOptions,
    /// Also record the one-vs-rest AUC of each class.
    pub per_class_auc: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            label_fractions: (1..=9).map(|i| i as f64 / 10.0).collect(),
            folds: 10,
            methods: Method::ALL.to_vec(),
            seed: 0,
            positive_class: None,
            classifier: ClassifierOptions::default(),
            per_class_auc: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.label_fractions.is_empty() {
            return Err(Error::Config("label_fractions must not be empty".into()));
        }
        if let Some(f) = self.label_fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
            return Err(Error::Config(format!("label_fractions: {f} is outside (0, 1)")));
        }
        if self.folds == 0 {
            return Err(Error::Config("folds must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::Config("methods contains duplicates".into()));
        }
        Ok(())
    }

    fn positive(&self, g: &LabeledGraph) -> Result<ClassId> {
        match &self.positive_class {
            Some(name) => g
                .dict()
                .lookup(name)
                .ok_or_else(|| Error::Config(format!("positive_class {name:?} is not a label"))),
            None => Ok(ClassId(0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_class_auc: Option<BTreeMap<String, f64>>,
    pub fallback_count: usize,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fraction: f64,
    pub fold: usize,
    /// Shared by every method of this fold.
    pub split_hash: Option<String>,
    pub train_size: usize,
    pub test_size: usize,
    pub error: Option<String>,
    pub results: Vec<MethodResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub method: Method,
    pub fraction: f64,
    /// `None` when no fold completed.
    pub mean_auc: Option<f64>,
    /// Sample standard deviation across completed folds; 0 for one fold.
    pub std_auc: Option<f64>,
    pub fold_aucs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub graph: String,
    pub seed: u64,
    pub node_count: usize,
    pub class_sizes: BTreeMap<String, usize>,
    pub positive_class: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
    pub folds: Vec<FoldRecord>,
    /// Every fold of every method produced an AUC.
    pub complete: bool,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn cell(&self, method: Method, fraction: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.fraction == fraction)
    }

    /// Long format: `graph,method,fraction,fold,auc`, completed folds only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("graph,method,fraction,fold,auc\n");
        for rec in &self.folds {
            for r in &rec.results {
                if let Some(a) = r.auc {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        csv_field(&self.graph),
                        r.method,
                        rec.fraction,
                        rec.fold,
                        a
                    ));
                }
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_fold(
    g: &LabeledGraph,
    config: &ExperimentConfig,
    positive: ClassId,
    fraction_index: usize,
    fold: usize,
) -> FoldRecord {
    let fraction = config.label_fractions[fraction_index];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(((fraction_index as u64) << 32) | fold as u64);
    let mut rec = FoldRecord {
        fraction,
        fold,
        split_hash: None,
        train_size: 0,
        test_size: 0,
        error: None,
        results: Vec::new(),
    };
    let split = match sample_split(g, fraction, positive, &mut rng) {
        Ok(s) => s,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.split_hash = Some(split_hash(g, &split));
    rec.train_size = split.train.len();
    rec.test_size = split.test.len();
    rec.results = config
        .methods
        .iter()
        .map(|&method| {
            let outcome = score(method, g, &split, &config.classifier).and_then(|sv| {
                let a = auc(&sv, g, &split)?;
                let per_class = if config.per_class_auc {
                    Some(per_class_auc(&sv, g, &split)?)
                } else {
                    None
                };
                Ok((sv, a, per_class))
            });
            match outcome {
                Ok((sv, a, per_class)) => MethodResult {
                    method,
                    auc: Some(a),
                    per_class_auc: per_class,
                    fallback_count: sv.fallback_count(),
                    converged: sv.converged,
                    error: None,
                },
                Err(e) => MethodResult {
                    method,
                    auc: None,
                    per_class_auc: None,
                    fallback_count: 0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    rec
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(std))
}

/// Evaluate every method on the same `folds` splits per label fraction.
/// Each fold draws from its own substream of `seed`, so the report does not
/// depend on thread scheduling.
pub fn run_experiment(g: &LabeledGraph, graph_id: &str, config: &ExperimentConfig) -> Result<EvalReport> {
    config.validate()?;
    let positive = config.positive(g)?;
    crate::classify::binary_negative(g, positive)?;
    let tasks: Vec<(usize, usize)> = (0..config.label_fractions.len())
        .flat_map(|fi| (0..config.folds).map(move |fold| (fi, fold)))
        .collect();
    let folds: Vec<FoldRecord> = tasks
        .par_iter()
        .map(|&(fi, fold)| run_fold(g, config, positive, fi, fold))
        .collect();

    let mut warnings = Vec::new();
    for rec in &folds {
        if let Some(e) = &rec.error {
            warnings.push(format!("fraction {} fold {}: {e}", rec.fraction, rec.fold));
        }
        for r in &rec.results {
            if let Some(e) = &r.error {
                warnings.push(format!("fraction {} fold {} {}: {e}", rec.fraction, rec.fold, r.method));
            } else if !r.converged {
                warnings.push(format!(
                    "fraction {} fold {} {}: solver hit its iteration cap",
                    rec.fraction, rec.fold, r.method
                ));
            }
        }
    }

    let mut cells = Vec::new();
    let mut complete = true;
    for &method in &config.methods {
        for (fi, &fraction) in config.label_fractions.iter().enumerate() {
            let fold_aucs: Vec<f64> = folds[fi * config.folds..(fi + 1) * config.folds]
                .iter()
                .filter_map(|rec| rec.results.iter().find(|r| r.method == method).and_then(|r| r.auc))
                .collect();
            complete &= fold_aucs.len() == config.folds;
            let (mean_auc, std_auc) = mean_std(&fold_aucs);
            cells.push(CellSummary { method, fraction, mean_auc, std_auc, fold_aucs });
        }
    }

    Ok(EvalReport {
        graph: graph_id.to_string(),
        seed: config.seed,
        node_count: g.node_count(),
        class_sizes: g.class_sizes(),
        positive_class: g.dict().name(positive).to_string(),
        config: config.clone(),
        cells,
        folds,
        complete,
        warnings,
    })
}
