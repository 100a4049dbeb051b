//! Overdispersed stochastic block model.
//!
//! Every node draws an in-class affinity `p_i,in` and an out-class affinity
//! `p_i,out` from Beta distributions with means `p_in`, `p_out` and variances
//! `φ* · p (1 − p)`. Edges are then realized Chung-Lu style so that a node's
//! expected in-class degree is about `p_i,in · n_r` and its expected
//! out-class degree about `p_i,out · (N − n_r)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClassId, LabelDict, LabeledGraph, NodeId};

/// Block-structure rates, given directly or through `λ` and a mean degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Explicit { p_in: f64, p_out: f64 },
    MeanDegree { lambda: f64, mean_degree: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsbmConfig {
    pub blocks: Vec<usize>,
    #[serde(flatten)]
    pub rates: Rates,
    #[serde(default)]
    pub phi_in: f64,
    #[serde(default)]
    pub phi_out: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub allow_self_loops: bool,
    /// Label of each block; defaults to the block index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl OsbmConfig {
    pub fn node_count(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn block_labels(&self) -> Vec<String> {
        match &self.labels {
            Some(l) => l.clone(),
            None => (0..self.blocks.len()).map(|i| i.to_string()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.len() < 2 {
            return Err(Error::Config("blocks: need at least 2 blocks".into()));
        }
        if self.blocks.iter().any(|&n| n == 0) {
            return Err(Error::Config("blocks: every block needs at least one node".into()));
        }
        for (name, phi) in [("phi_in", self.phi_in), ("phi_out", self.phi_out)] {
            if !(0.0..1.0).contains(&phi) {
                return Err(Error::Config(format!("{name}: must lie in [0, 1), got {phi}")));
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.blocks.len() {
                return Err(Error::Config(format!(
                    "labels: {} labels for {} blocks",
                    labels.len(),
                    self.blocks.len()
                )));
            }
            let dict = LabelDict::from_names(labels.iter().cloned());
            if dict.len() != labels.len() {
                return Err(Error::Config("labels: block labels must be distinct".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRates {
    pub p_in: f64,
    pub p_out: f64,
    /// `p_out` is exactly zero: blocks are disconnected from each other.
    pub boundary: bool,
}

/// Solve for `p_in`, `p_out` that give mean degree `mean_degree` with
/// `p_in = λ · d̄ / N`.
pub fn resolve_rates(blocks: &[usize], mean_degree: f64, lambda: f64) -> Result<ResolvedRates> {
    if lambda < 1.0 {
        return Err(Error::Config(format!("lambda: must be at least 1, got {lambda}")));
    }
    if !(mean_degree > 0.0) {
        return Err(Error::Config(format!(
            "mean_degree: must be positive, got {mean_degree}"
        )));
    }
    let n: f64 = blocks.iter().map(|&b| b as f64).sum();
    let sum_sq: f64 = blocks.iter().map(|&b| (b as f64).powi(2)).sum();
    let cross: f64 = blocks.iter().map(|&b| b as f64 * (n - b as f64)).sum();
    if cross == 0.0 {
        return Err(Error::Config("blocks: need at least 2 nonempty blocks".into()));
    }
    let p_in = lambda * mean_degree / n;
    let mut p_out = (mean_degree * n - p_in * sum_sq) / cross;
    let max_lambda = n * n / sum_sq;
    if p_out < 0.0 {
        if p_out > -1e-12 {
            p_out = 0.0;
        } else {
            return Err(Error::Config(format!(
                "lambda: {lambda} makes p_out negative; the largest feasible lambda is {max_lambda}"
            )));
        }
    }
    if p_in >= 1.0 || p_out >= 1.0 {
        return Err(Error::Config(format!(
            "mean_degree: {mean_degree} with lambda {lambda} needs p_in = {p_in}, p_out = {p_out}, both must stay below 1"
        )));
    }
    Ok(ResolvedRates {
        p_in,
        p_out,
        boundary: p_out == 0.0,
    })
}

impl OsbmConfig {
    pub fn resolve(&self) -> Result<ResolvedRates> {
        self.validate()?;
        match self.rates {
            Rates::MeanDegree { lambda, mean_degree } => {
                resolve_rates(&self.blocks, mean_degree, lambda)
            }
            Rates::Explicit { p_in, p_out } => {
                if !(p_in > 0.0 && p_in < 1.0) {
                    return Err(Error::Config(format!("p_in: must lie in (0, 1), got {p_in}")));
                }
                if !(0.0..1.0).contains(&p_out) {
                    return Err(Error::Config(format!("p_out: must lie in [0, 1), got {p_out}")));
                }
                Ok(ResolvedRates {
                    p_in,
                    p_out,
                    boundary: p_out == 0.0,
                })
            }
        }
    }
}

/// Beta shape parameters with mean `p` and variance `phi · p (1 − p)`.
pub fn beta_params(p: f64, phi: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Config(format!("Beta mean must lie in (0, 1), got {p}")));
    }
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::Config(format!("dispersion must lie in (0, 1), got {phi}")));
    }
    let scale = (1.0 / phi) * (1.0 - phi);
    Ok((p * scale, (1.0 - p) * scale))
}

/// Beta variate as `X / (X + Y)` with `X ~ Gamma(α)`, `Y ~ Gamma(β)`.
#[derive(Debug, Clone, Copy)]
struct BetaSampler {
    x: Gamma<f64>,
    y: Gamma<f64>,
    mean: f64,
}

impl BetaSampler {
    fn new(alpha: f64, beta: f64) -> Result<Self> {
        let gamma = |shape| Gamma::new(shape, 1.0).map_err(|e| Error::Config(e.to_string()));
        Ok(Self {
            x: gamma(alpha)?,
            y: gamma(beta)?,
            mean: alpha / (alpha + beta),
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        for _ in 0..64 {
            let x = self.x.sample(rng);
            let y = self.y.sample(rng);
            let s = x + y;
            if s > 0.0 && s.is_finite() {
                return x / s;
            }
        }
        // Both Gamma draws underflowed repeatedly; only reachable for shapes
        // far below anything a valid config produces.
        if rng.random::<f64>() < self.mean {
            1.0
        } else {
            0.0
        }
    }
}

/// Per-node affinities. Nodes of block `b` occupy a contiguous id range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceDraw {
    pub block_sizes: Vec<usize>,
    pub block_of: Vec<usize>,
    pub p_in: Vec<f64>,
    pub p_out: Vec<f64>,
}

impl PreferenceDraw {
    pub fn node_count(&self) -> usize {
        self.block_of.len()
    }

    /// `p_i,in · n_r`
    pub fn expected_in_degree(&self, node: NodeId) -> f64 {
        self.p_in[node] * self.block_sizes[self.block_of[node]] as f64
    }

    /// `p_i,out · (N − n_r)`
    pub fn expected_out_degree(&self, node: NodeId) -> f64 {
        let n = self.node_count() as f64;
        self.p_out[node] * (n - self.block_sizes[self.block_of[node]] as f64)
    }

    fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        let start: usize = self.block_sizes[..block].iter().sum();
        start..start + self.block_sizes[block]
    }
}

fn affinity_sampler(mean: f64, phi: f64) -> Result<Option<BetaSampler>> {
    if phi == 0.0 || mean == 0.0 {
        return Ok(None);
    }
    let (a, b) = beta_params(mean, phi)?;
    Ok(Some(BetaSampler::new(a, b)?))
}

/// Draw node affinities from RNG stream 0 of `seed`.
pub fn draw_preferences(config: &OsbmConfig, rates: &ResolvedRates, seed: u64) -> Result<PreferenceDraw> {
    config.validate()?;
    let in_sampler = affinity_sampler(rates.p_in, config.phi_in)?;
    let out_sampler = affinity_sampler(rates.p_out, config.phi_out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let n = config.node_count();
    let mut draw = PreferenceDraw {
        block_sizes: config.blocks.clone(),
        block_of: Vec::with_capacity(n),
        p_in: Vec::with_capacity(n),
        p_out: Vec::with_capacity(n),
    };
    for (block, &size) in config.blocks.iter().enumerate() {
        for _ in 0..size {
            draw.block_of.push(block);
            draw.p_in.push(match &in_sampler {
                Some(s) => s.sample(&mut rng),
                None => rates.p_in,
            });
            draw.p_out.push(match &out_sampler {
                Some(s) => s.sample(&mut rng),
                None => rates.p_out,
            });
        }
    }
    Ok(draw)
}

/// Realize edges for a fixed affinity draw. Block pair `(a, b)` with `a ≤ b`
/// uses RNG stream `1 + a·k + b` of `seed`, so the result does not depend on
/// how pairs are scheduled.
pub fn realize_edges(
    config: &OsbmConfig,
    rates: &ResolvedRates,
    draw: &PreferenceDraw,
    seed: u64,
) -> Result<LabeledGraph> {
    let k = config.blocks.len();
    let n = draw.node_count();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let per_pair: Vec<Vec<(NodeId, NodeId)>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1 + (a * k + b) as u64);
            let mut arcs = Vec::new();
            if a == b {
                if rates.p_in == 0.0 {
                    return arcs;
                }
                let nr = config.blocks[a] as f64;
                let norm = nr * nr * rates.p_in;
                let range = draw.block_range(a);
                for i in range.clone() {
                    let di = draw.expected_in_degree(i);
                    let first = if config.allow_self_loops { i } else { i + 1 };
                    for j in first..range.end {
                        let p = (di * draw.expected_in_degree(j) / norm).min(1.0);
                        if rng.random::<f64>() < p {
                            arcs.push((i, j));
                        }
                    }
                }
            } else {
                if rates.p_out == 0.0 {
                    return arcs;
                }
                let nf = n as f64;
                let norm = (nf - config.blocks[a] as f64) * (nf - config.blocks[b] as f64) * rates.p_out;
                for i in draw.block_range(a) {
                    let di = draw.expected_out_degree(i);
                    for j in draw.block_range(b) {
                        let p = (di * draw.expected_out_degree(j) / norm).min(1.0);
                        if rng.random::<f64>() < p {
                            arcs.push((i, j));
                        }
                    }
                }
            }
            arcs
        })
        .collect();

    let names = config.block_labels();
    let dict = LabelDict::from_names(names.iter().cloned());
    let block_class: Vec<ClassId> = names
        .iter()
        .map(|l| dict.lookup(l).expect("label in dictionary"))
        .collect();
    let labels = draw.block_of.iter().map(|&b| Some(block_class[b])).collect();
    let source_ids = (0..n as u64).collect();
    if config.allow_self_loops {
        LabeledGraph::from_parts_keeping_loops(n, per_pair.into_iter().flatten(), labels, dict, source_ids)
    } else {
        LabeledGraph::from_parts(n, per_pair.into_iter().flatten(), labels, dict, source_ids, false)
    }
}

/// Result of one oSBM sample.
#[derive(Debug, Clone)]
pub struct OsbmSample {
    pub graph: LabeledGraph,
    pub rates: ResolvedRates,
    pub preferences: PreferenceDraw,
    pub warnings: Vec<String>,
}

/// Draw affinities and realize a graph, both from `config.seed`.
pub fn sample_osbm(config: &OsbmConfig) -> Result<OsbmSample> {
    let rates = config.resolve()?;
    let mut warnings = Vec::new();
    if rates.boundary {
        warnings.push("p_out is 0: no edges between blocks, the graph is disconnected".to_string());
    }
    let preferences = draw_preferences(config, &rates, config.seed)?;
    let graph = realize_edges(config, &rates, &preferences, config.seed)?;
    Ok(OsbmSample {
        graph,
        rates,
        preferences,
        warnings,
    })
}
