use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClassDegreeSequence, ClassId};

use super::special::chi_square_sf;

pub fn logistic(beta: f64) -> f64 {
    1.0 / (1.0 + (-beta).exp())
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Fraction of the class's edge endpoints that land on the same class:
/// `Σ d_in / Σ d_i`.
pub fn homophily_index(seq: &ClassDegreeSequence) -> Result<f64> {
    let (sum_in, sum_deg) = seq
        .entries
        .iter()
        .fold((0u64, 0u64), |(a, b), e| (a + e.d_in, b + e.degree()));
    if sum_deg == 0 {
        return Err(Error::Degenerate(format!(
            "class {} has no incident edges",
            seq.class_name
        )));
    }
    Ok(sum_in as f64 / sum_deg as f64)
}

/// Binomial fit with a single intercept and no overdispersion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model1Fit {
    pub class: ClassId,
    pub class_name: String,
    pub h_hat: f64,
    /// Maximum-likelihood intercept, `logit(h_hat)`.
    pub beta0_mle: f64,
    /// Pearson goodness-of-fit statistic.
    pub x2: f64,
    pub dof: u64,
    /// Chi-square upper tail of `x2` at `dof`.
    pub p_value: f64,
    /// Nodes with positive degree, the ones entering the fit.
    pub n_used: usize,
    /// Nodes left out because their degree is zero.
    pub zero_degree_excluded: usize,
}

pub fn fit_model1(seq: &ClassDegreeSequence) -> Result<Model1Fit> {
    let used: Vec<(f64, f64)> = seq
        .entries
        .iter()
        .filter(|e| e.degree() > 0)
        .map(|e| (e.d_in as f64, e.degree() as f64))
        .collect();
    let zero_degree_excluded = seq.entries.len() - used.len();
    if used.len() < 2 {
        return Err(Error::Degenerate(format!(
            "class {} has {} nodes with positive degree, need at least 2",
            seq.class_name,
            used.len()
        )));
    }
    let h_hat = homophily_index(seq)?;
    if h_hat <= 0.0 || h_hat >= 1.0 {
        return Err(Error::PerfectSeparation {
            class: seq.class_name.clone(),
            h_hat,
        });
    }
    let var_unit = h_hat * (1.0 - h_hat);
    let x2: f64 = used
        .iter()
        .map(|&(d_in, d)| {
            let r = d_in - d * h_hat;
            r * r / (d * var_unit)
        })
        .sum();
    let dof = used.len() as u64 - 1;
    Ok(Model1Fit {
        class: seq.class,
        class_name: seq.class_name.clone(),
        h_hat,
        beta0_mle: logit(h_hat),
        x2,
        dof,
        p_value: chi_square_sf(x2, dof),
        n_used: used.len(),
        zero_degree_excluded,
    })
}
