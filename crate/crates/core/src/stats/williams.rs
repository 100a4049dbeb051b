//! Williams' iterative quasi-likelihood estimator of extra-binomial variation.
//!
//! Model II keeps the binomial mean `d_i · h` but inflates the variance to
//! `d_i · h (1 − h) · (1 + (d_i − 1) φ)`. The estimator starts from the
//! Model I fit, tests its Pearson statistic against `χ²(n − 1)`, and when the
//! test rejects alternates weighted intercept updates with moment updates of
//! `φ` until the weighted statistic matches its degrees of freedom.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClassDegreeSequence, ClassId};

use super::model1::{fit_model1, logistic, Model1Fit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilliamsOptions {
    /// Significance level of the initial overdispersion test.
    pub alpha: f64,
    pub max_iter: usize,
    /// Stop when `|X² − dof| ≤ closeness · dof`.
    pub closeness: f64,
}

impl Default for WilliamsOptions {
    fn default() -> Self {
        Self {
            alpha: 0.001,
            max_iter: 100,
            closeness: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionFit {
    pub class: ClassId,
    pub class_name: String,
    /// The Model I fit the procedure starts from.
    pub initial: Model1Fit,
    pub beta0_mqe: f64,
    pub h_mqe: f64,
    pub phi_hat: f64,
    pub iterations: usize,
    pub converged: bool,
    /// A `φ` update went negative; `phi_hat` was set to 0 and iteration stopped.
    pub clamped: bool,
    /// Initial statistic followed by the weighted statistic of every iteration.
    pub x2_trace: Vec<f64>,
    /// The Model I test rejected at `alpha`.
    pub significant: bool,
    pub alpha: f64,
}

impl DispersionFit {
    pub fn final_x2(&self) -> f64 {
        *self.x2_trace.last().expect("trace holds the initial statistic")
    }

    pub fn record(&self) -> FitRecord {
        FitRecord {
            class: self.class_name.clone(),
            h_hat: self.initial.h_hat,
            beta0_mle: self.initial.beta0_mle,
            beta0_mqe: self.beta0_mqe,
            phi_hat: self.phi_hat,
            x2: self.initial.x2,
            dof: self.initial.dof,
            p_value: self.initial.p_value,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

/// Flat JSON form of a class fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub class: String,
    pub h_hat: f64,
    pub beta0_mle: f64,
    pub beta0_mqe: f64,
    pub phi_hat: f64,
    pub x2: f64,
    pub dof: u64,
    pub p_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Obs {
    d_in: f64,
    d: f64,
}

pub fn fit_williams(seq: &ClassDegreeSequence, opts: &WilliamsOptions) -> Result<DispersionFit> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::Argument(format!(
            "alpha must lie in (0, 1), got {}",
            opts.alpha
        )));
    }
    let initial = fit_model1(seq)?;
    let obs: Vec<Obs> = seq
        .entries
        .iter()
        .filter(|e| e.degree() > 0)
        .map(|e| Obs {
            d_in: e.d_in as f64,
            d: e.degree() as f64,
        })
        .collect();
    let dof = initial.dof as f64;
    let mut fit = DispersionFit {
        class: seq.class,
        class_name: seq.class_name.clone(),
        beta0_mqe: initial.beta0_mle,
        h_mqe: initial.h_hat,
        phi_hat: 0.0,
        iterations: 0,
        converged: true,
        clamped: false,
        x2_trace: vec![initial.x2],
        significant: initial.p_value < opts.alpha,
        alpha: opts.alpha,
        initial,
    };
    if !fit.significant {
        return Ok(fit);
    }

    let mut beta = fit.initial.beta0_mle;
    let mut h = fit.initial.h_hat;
    let mut v: Vec<f64> = obs.iter().map(|o| o.d * h * (1.0 - h)).collect();

    let q0 = 1.0 / v.iter().sum::<f64>();
    let denom0: f64 = obs
        .iter()
        .zip(&v)
        .map(|(o, &vi)| (o.d - 1.0) * (1.0 - vi * q0))
        .sum();
    if denom0 <= 0.0 {
        return Err(Error::Degenerate(format!(
            "class {}: overdispersion is not identifiable when every node has degree 1",
            seq.class_name
        )));
    }
    let mut phi = (fit.initial.x2 - dof) / denom0;
    if phi < 0.0 {
        fit.clamped = true;
        fit.converged = false;
        return Ok(fit);
    }

    fit.converged = false;
    let mut w = vec![0.0; obs.len()];
    for iter in 1..=opts.max_iter {
        for (wi, o) in w.iter_mut().zip(&obs) {
            *wi = 1.0 / (1.0 + phi * (o.d - 1.0));
        }
        // One weighted scoring step for the intercept.
        let (num, den) = obs.iter().zip(&w).zip(&v).fold(
            (0.0, 0.0),
            |(num, den), ((o, &wi), &vi)| {
                (
                    num + wi * (vi * beta + o.d_in - o.d * h),
                    den + wi * vi,
                )
            },
        );
        beta = num / den;
        h = logistic(beta);
        for (vi, o) in v.iter_mut().zip(&obs) {
            *vi = o.d * h * (1.0 - h);
        }
        let x2: f64 = obs
            .iter()
            .zip(&w)
            .zip(&v)
            .map(|((o, &wi), &vi)| {
                let r = o.d_in - o.d * h;
                wi * r * r / vi
            })
            .sum();
        if !x2.is_finite() || !beta.is_finite() {
            return Err(Error::Numeric(format!(
                "class {}: Williams iteration produced a non-finite statistic",
                seq.class_name
            )));
        }
        fit.x2_trace.push(x2);
        fit.iterations = iter;
        fit.beta0_mqe = beta;
        fit.h_mqe = h;
        fit.phi_hat = phi;
        if (x2 - dof).abs() <= opts.closeness * dof {
            fit.converged = true;
            break;
        }
        let q = 1.0 / w.iter().zip(&v).map(|(wi, vi)| wi * vi).sum::<f64>();
        let (num, den) = obs.iter().zip(&w).zip(&v).fold(
            (0.0, 0.0),
            |(num, den), ((o, &wi), &vi)| {
                let lev = 1.0 - wi * vi * q;
                (num + wi * lev, den + wi * (o.d - 1.0) * lev)
            },
        );
        let next = (x2 - num) / den;
        if next < 0.0 {
            fit.phi_hat = 0.0;
            fit.clamped = true;
            break;
        }
        phi = next;
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Beta, Binomial, Distribution};

    fn binomial_seq(n: usize, d: u64, h: f64, seed: u64) -> ClassDegreeSequence {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bin = Binomial::new(d, h).unwrap();
        let pairs: Vec<_> = (0..n).map(|_| (bin.sample(&mut rng), d)).collect();
        ClassDegreeSequence::from_counts(&pairs).unwrap()
    }

    /// Latent Beta with mean `h` and variance `phi · h (1 − h)`.
    fn beta_binomial_seq(n: usize, d: u64, h: f64, phi: f64, seed: u64) -> ClassDegreeSequence {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = (1.0 - phi) / phi;
        let beta = Beta::new(h * s, (1.0 - h) * s).unwrap();
        let pairs: Vec<_> = (0..n)
            .map(|_| {
                let p: f64 = beta.sample(&mut rng);
                (Binomial::new(d, p).unwrap().sample(&mut rng), d)
            })
            .collect();
        ClassDegreeSequence::from_counts(&pairs).unwrap()
    }

    #[test]
    fn binomial_data_is_not_overdispersed() {
        let opts = WilliamsOptions::default();
        let clean = (0..40)
            .filter(|&seed| {
                let fit = fit_williams(&binomial_seq(2000, 100, 0.5, seed), &opts).unwrap();
                !fit.significant && fit.phi_hat == 0.0
            })
            .count();
        assert!(clean as f64 >= 0.95 * 40.0, "{clean}/40");
    }

    #[test]
    fn recovers_beta_binomial_dispersion() {
        let opts = WilliamsOptions::default();
        let hits = (0..30)
            .filter(|&seed| {
                let fit = fit_williams(&beta_binomial_seq(2000, 100, 0.5, 0.15, seed), &opts).unwrap();
                fit.significant && fit.converged && (0.10..=0.20).contains(&fit.phi_hat)
            })
            .count();
        assert!(hits as f64 >= 0.9 * 30.0, "{hits}/30");
    }

    #[test]
    fn converged_fit_matches_dof() {
        let s = beta_binomial_seq(500, 40, 0.3, 0.1, 3);
        let opts = WilliamsOptions::default();
        let fit = fit_williams(&s, &opts).unwrap();
        assert!(fit.converged);
        let dof = fit.initial.dof as f64;
        assert!((fit.final_x2() - dof).abs() <= opts.closeness * dof);
        assert!(fit.h_mqe > 0.0 && fit.h_mqe < 1.0);
        assert_eq!(fit.x2_trace.len(), fit.iterations + 1);
    }

    #[test]
    fn mqe_is_close_to_mle_for_equal_degrees() {
        let fit = fit_williams(&beta_binomial_seq(1000, 50, 0.4, 0.2, 11), &Default::default()).unwrap();
        assert!((fit.beta0_mqe - fit.initial.beta0_mle).abs() < 1e-6);
    }

    #[test]
    fn always_reject_on_binomial_data_drives_phi_to_zero() {
        let opts = WilliamsOptions {
            alpha: 1.0 - 1e-12,
            ..Default::default()
        };
        for seed in 0..20 {
            let fit = fit_williams(&binomial_seq(500, 30, 0.4, seed), &opts).unwrap();
            assert!(fit.significant);
            assert!(fit.phi_hat < 0.01, "seed {seed}: {}", fit.phi_hat);
            assert!(fit.phi_hat >= 0.0);
        }
        // At least one seed lands below the degrees of freedom and is clamped.
        let clamped = (0..20)
            .filter(|&seed| fit_williams(&binomial_seq(500, 30, 0.4, seed), &opts).unwrap().clamped)
            .count();
        assert!(clamped > 0);
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let opts = WilliamsOptions {
            max_iter: 1,
            closeness: 1e-12,
            ..Default::default()
        };
        // Equal degrees converge in a single step, so mix two degrees.
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        for (d, seed) in [(20, 1), (90, 2)] {
            let s = beta_binomial_seq(400, d, 0.5, 0.2, seed);
            pairs.extend(s.entries.iter().map(|e| (e.d_in, e.degree())));
        }
        let seq = ClassDegreeSequence::from_counts(&pairs).unwrap();
        let fit = fit_williams(&seq, &opts).unwrap();
        assert!(fit.significant);
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 1);
    }

    #[test]
    fn invalid_alpha_rejected() {
        let s = binomial_seq(10, 10, 0.5, 0);
        for alpha in [0.0, 1.0, -0.5] {
            let opts = WilliamsOptions { alpha, ..Default::default() };
            assert!(matches!(fit_williams(&s, &opts), Err(Error::Argument(_))));
        }
    }

    #[test]
    fn record_serializes_expected_keys() {
        let fit = fit_williams(&beta_binomial_seq(300, 20, 0.5, 0.2, 5), &Default::default()).unwrap();
        let json = serde_json::to_value(fit.record()).unwrap();
        for key in [
            "class", "h_hat", "beta0_mle", "beta0_mqe", "phi_hat", "x2", "dof", "p_value",
            "iterations", "converged",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
