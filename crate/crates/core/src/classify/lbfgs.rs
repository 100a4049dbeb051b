//! Limited-memory BFGS with Armijo backtracking.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iter: usize,
    /// Stop when the Euclidean gradient norm is at most this value.
    pub grad_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iter: 500,
            grad_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimize `f` from `x0`. `f` writes the gradient into its second argument
/// and returns the objective value.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: &LbfgsOptions) -> Result<LbfgsOutcome>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut value = f(&x, &mut g);
    check(value)?;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut alpha_buf = vec![0.0; opts.memory];

    for iter in 0..opts.max_iter {
        let gnorm = norm(&g);
        if gnorm <= opts.grad_tol {
            return Ok(LbfgsOutcome { x, value, grad_norm: gnorm, iterations: iter, converged: true });
        }

        // Two-loop recursion for d = −H g.
        dir.copy_from_slice(&g);
        for (k, (s, y, rho)) in history.iter().enumerate().rev() {
            let a = rho * dot(s, &dir);
            alpha_buf[k] = a;
            dir.iter_mut().zip(y).for_each(|(d, yi)| *d -= a * yi);
        }
        let gamma = history
            .back()
            .map(|(s, y, _)| dot(s, y) / dot(y, y))
            .unwrap_or(1.0 / gnorm.max(1.0));
        dir.iter_mut().for_each(|d| *d *= gamma);
        for (k, (s, y, rho)) in history.iter().enumerate() {
            let b = rho * dot(y, &dir);
            dir.iter_mut().zip(s).for_each(|(d, si)| *d += (alpha_buf[k] - b) * si);
        }
        dir.iter_mut().for_each(|d| *d = -*d);

        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            history.clear();
            for (d, gi) in dir.iter_mut().zip(&g) {
                *d = -gi;
            }
            slope = -gnorm * gnorm;
        }

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            for ((xn, xi), di) in x_new.iter_mut().zip(&x).zip(&dir) {
                *xn = xi + step * di;
            }
            let v = f(&x_new, &mut g_new);
            if v.is_finite() && v <= value + 1e-4 * step * slope {
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No further decrease is representable; report where we stopped.
            return Ok(LbfgsOutcome { x, value, grad_norm: gnorm, iterations: iter, converged: false });
        }
        check(value)?;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if history.len() == opts.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
    }
    let gnorm = norm(&g);
    Ok(LbfgsOutcome {
        x,
        value,
        grad_norm: gnorm,
        iterations: opts.max_iter,
        converged: gnorm <= opts.grad_tol,
    })
}

fn check(value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric("objective became non-finite".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_convex_quadratic() {
        // f = Σ c_i (x_i − t_i)², minimum at t.
        let c = [1.0, 10.0, 100.0, 0.5];
        let t = [3.0, -2.0, 0.25, 7.0];
        let out = minimize(
            |x, g| {
                let mut v = 0.0;
                for i in 0..4 {
                    v += c[i] * (x[i] - t[i]).powi(2);
                    g[i] = 2.0 * c[i] * (x[i] - t[i]);
                }
                v
            },
            vec![0.0; 4],
            &LbfgsOptions::default(),
        )
        .unwrap();
        assert!(out.converged);
        for i in 0..4 {
            assert!((out.x[i] - t[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn minimizes_rosenbrock() {
        let out = minimize(
            |x, g| {
                let (a, b) = (x[0], x[1]);
                g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
                g[1] = 200.0 * (b - a * a);
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
            },
            vec![-1.2, 1.0],
            &LbfgsOptions::default(),
        )
        .unwrap();
        assert!(out.converged, "{out:?}");
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let out = minimize(
            |x, g| {
                g[0] = 2.0 * x[0];
                g[1] = 2e6 * x[1];
                x[0] * x[0] + 1e6 * x[1] * x[1]
            },
            vec![1.0, 1.0],
            &LbfgsOptions { max_iter: 1, ..Default::default() },
        )
        .unwrap();
        assert!(!out.converged);
    }

    #[test]
    fn non_finite_start_is_an_error() {
        let res = minimize(|_, _| f64::NAN, vec![0.0], &LbfgsOptions::default());
        assert!(matches!(res, Err(Error::Numeric(_))));
    }
}
