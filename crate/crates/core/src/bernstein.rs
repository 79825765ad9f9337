//! Sampled checks of complete monotonicity and the Bernstein property.
//!
//! A function `f` on `(0, ∞)` is completely monotone (CMF) when
//! `(−1)^n f^{(n)} ≥ 0` for all `n`, and a Bernstein function when `f ≥ 0`
//! and `f'` is completely monotone. Derivatives are estimated by central
//! differences on a log grid with one Richardson halving; a sign is reported
//! wrong only when it is wrong by more than the estimated difference noise.
//! Passing a check means the sampled data are *consistent with* the property.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::MultiTermProblem;

/// Highest derivative order sampled; beyond it double precision differences
/// carry no sign information.
pub const MAX_ORDER: usize = 6;

/// Default tolerance on a wrong-signed derivative, relative to `|f(s)|/s^n`.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BernsteinError {
    #[error("function evaluation failed at s = {s}: {message}")]
    Evaluation { s: f64, message: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Log-spaced sample points `min = s_0 < … < s_{points−1} = max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    /// `s ∈ [1e−4, 1e4]`, ten points per decade.
    fn default() -> Self {
        GridSpec {
            min: 1e-4,
            max: 1e4,
            points: 81,
        }
    }
}

impl GridSpec {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        GridSpec { min, max, points }
    }

    pub fn samples(&self) -> Result<Vec<f64>, BernsteinError> {
        if !(self.min > 0.0 && self.max > self.min && self.max.is_finite()) {
            return Err(BernsteinError::InvalidGrid(format!(
                "need 0 < min < max < ∞, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(BernsteinError::InvalidGrid(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| match i {
                0 => self.min,
                i if i == self.points - 1 => self.max,
                i => (lo + (hi - lo) * i as f64 / last).exp(),
            })
            .collect())
    }
}

/// Where the largest wrong-signed derivative was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub worst_s: f64,
    pub worst_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub property: String,
    pub grid: Vec<f64>,
    /// `differences[n][i]`: estimate of `f^{(n)}(grid[i])`.
    pub differences: Vec<Vec<f64>>,
    /// Estimated noise of each entry of `differences`.
    pub noise: Vec<Vec<f64>>,
    /// Largest wrong-signed derivative beyond its noise, relative to `|f(s)|/s^n`.
    pub max_violation: f64,
    pub order_checked: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl MonotonicityReport {
    /// A one-line summary that states what the sample supports.
    pub fn statement(&self) -> String {
        let range = match (self.grid.first(), self.grid.last()) {
            (Some(a), Some(b)) => format!("s ∈ [{a:e}, {b:e}]"),
            _ => "an empty grid".into(),
        };
        if self.verdict.passed {
            format!(
                "consistent with {} on {} up to order {} (max violation {:.3e} ≤ {:.1e})",
                self.property, range, self.order_checked, self.max_violation, self.tolerance
            )
        } else {
            format!(
                "not {}: derivative of order {} has the wrong sign at s = {:e} (violation {:.3e} > {:.1e})",
                self.property,
                self.verdict.worst_order,
                self.verdict.worst_s,
                self.max_violation,
                self.tolerance
            )
        }
    }
}

/// `f^{(n)}(s)` and an estimate of its error.
///
/// The step `h = sδ` grows with the order: `δ = max(1e−3, ε^{1/(n+4)})`
/// balances the `O(h⁴)` Richardson truncation against rounding of order
/// `ε|f|/h^n`.
pub fn derivative<F, E>(f: &F, s: f64, n: usize) -> Result<(f64, f64), BernsteinError>
where
    F: Fn(f64) -> Result<f64, E>,
    E: std::fmt::Display,
{
    let eval = |x: f64| {
        f(x).map_err(|e| BernsteinError::Evaluation {
            s: x,
            message: e.to_string(),
        })
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(BernsteinError::Evaluation {
                    s: x,
                    message: format!("non-finite value {v}"),
                })
            }
        })
    };
    let f0 = eval(s)?;
    if n == 0 {
        return Ok((f0, f64::EPSILON * f0.abs()));
    }
    let delta = f64::EPSILON.powf(1.0 / (n as f64 + 4.0)).max(1e-3);
    let h = s * delta;
    let mut magnitude: f64 = f0.abs();
    let mut central = |h: f64| -> Result<f64, BernsteinError> {
        // h^{-n} Σ_k (−1)^k C(n,k) f(s + (n/2 − k) h)
        let mut sum = 0.0;
        let mut binom = 1.0;
        for k in 0..=n {
            let v = eval(s + (n as f64 / 2.0 - k as f64) * h)?;
            magnitude = magnitude.max(v.abs());
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binom * v;
            binom = binom * (n - k) as f64 / (k + 1) as f64;
        }
        Ok(sum / h.powi(n as i32))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let value = (4.0 * fine - coarse) / 3.0;
    let rounding = 4.0 * f64::EPSILON * 2f64.powi(n as i32) * magnitude / (0.5 * h).powi(n as i32);
    Ok((value, (value - fine).abs() + rounding))
}

/// Checks that `sign(n)·f^{(n)} ≥ 0` for `n ∈ orders` on the grid.
fn check_signs<F, E>(
    f: &F,
    grid: &GridSpec,
    orders: std::ops::RangeInclusive<usize>,
    sign: impl Fn(usize) -> f64,
    tolerance: f64,
    property: &str,
) -> Result<MonotonicityReport, BernsteinError>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: std::fmt::Display,
{
    let samples = grid.samples()?;
    let top = *orders.end();
    let rows: Vec<Vec<(f64, f64)>> = samples
        .par_iter()
        .map(|&s| (0..=top).map(|n| derivative(f, s, n)).collect())
        .collect::<Result<_, _>>()?;
    let mut max_violation: f64 = 0.0;
    let mut verdict = Verdict {
        passed: true,
        worst_s: samples[0],
        worst_order: *orders.start(),
    };
    for (i, &s) in samples.iter().enumerate() {
        let scale_base = rows[i][0].0.abs().max(f64::MIN_POSITIVE);
        for n in orders.clone() {
            let (d, noise) = rows[i][n];
            let signed = sign(n) * d;
            if signed >= 0.0 {
                continue;
            }
            let scale = scale_base / s.powi(n as i32);
            let excess = (-signed - noise) / scale;
            if excess > max_violation {
                max_violation = excess;
                verdict.worst_s = s;
                verdict.worst_order = n;
            }
        }
    }
    verdict.passed = max_violation <= tolerance;
    Ok(MonotonicityReport {
        property: property.into(),
        grid: samples,
        differences: (0..=top).map(|n| rows.iter().map(|r| r[n].0).collect()).collect(),
        noise: (0..=top).map(|n| rows.iter().map(|r| r[n].1).collect()).collect(),
        max_violation,
        order_checked: top,
        tolerance,
        verdict,
    })
}

/// Samples `√g` and checks `√g ≥ 0` and `(−1)^{n−1} (√g)^{(n)} ≥ 0` for
/// `n = 1..order` (order clamped to `[1, 6]`).
pub fn check_bernstein_sqrt_g(
    p: &MultiTermProblem,
    grid: &GridSpec,
    order: usize,
) -> Result<MonotonicityReport, BernsteinError> {
    check_bernstein_sqrt_g_with(p, grid, order, DEFAULT_TOLERANCE)
}

pub fn check_bernstein_sqrt_g_with(
    p: &MultiTermProblem,
    grid: &GridSpec,
    order: usize,
    tolerance: f64,
) -> Result<MonotonicityReport, BernsteinError> {
    let f = |s: f64| p.sqrt_g(Complex64::new(s, 0.0)).map(|v| v.re);
    check_bernstein(&f, grid, order, tolerance)
}

/// Bernstein check for an arbitrary function.
pub fn check_bernstein<F, E>(
    f: &F,
    grid: &GridSpec,
    order: usize,
    tolerance: f64,
) -> Result<MonotonicityReport, BernsteinError>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: std::fmt::Display,
{
    let order = order.clamp(1, MAX_ORDER);
    check_signs(
        f,
        grid,
        0..=order,
        |n| if n == 0 || n % 2 == 1 { 1.0 } else { -1.0 },
        tolerance,
        "a Bernstein function",
    )
}

/// Checks `(−1)^n f^{(n)} ≥ 0` for `n = 0..order` (order clamped to `≤ 6`).
pub fn check_cmf<F, E>(f: &F, grid: &GridSpec, order: usize) -> Result<MonotonicityReport, BernsteinError>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: std::fmt::Display,
{
    check_cmf_with(f, grid, order, DEFAULT_TOLERANCE)
}

pub fn check_cmf_with<F, E>(
    f: &F,
    grid: &GridSpec,
    order: usize,
    tolerance: f64,
) -> Result<MonotonicityReport, BernsteinError>
where
    F: Fn(f64) -> Result<f64, E> + Sync,
    E: std::fmt::Display,
{
    let order = order.min(MAX_ORDER);
    check_signs(
        f,
        grid,
        0..=order,
        |n| if n % 2 == 0 { 1.0 } else { -1.0 },
        tolerance,
        "completely monotone",
    )
}

/// A point where `√g` is locally convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityWitness {
    pub s: f64,
    pub second_difference: f64,
    pub noise: f64,
    /// `second_difference · s² / √g(s)`.
    pub relative: f64,
}

/// Scans the grid in increasing `s` for the first point where the second
/// derivative of `√g` is positive by more than its noise and
/// [`DEFAULT_TOLERANCE`] relative to `√g(s)/s²`.
pub fn check_concavity_scan(
    p: &MultiTermProblem,
    range: &GridSpec,
) -> Result<Option<ConcavityWitness>, BernsteinError> {
    let f = |s: f64| p.sqrt_g(Complex64::new(s, 0.0)).map(|v| v.re);
    let samples = range.samples()?;
    let found: Vec<Option<ConcavityWitness>> = samples
        .par_iter()
        .map(|&s| {
            let (value, _) = derivative(&f, s, 0)?;
            let (d2, noise) = derivative(&f, s, 2)?;
            let scale = value.abs().max(f64::MIN_POSITIVE) / (s * s);
            let relative = (d2 - noise) / scale;
            Ok((relative > DEFAULT_TOLERANCE).then_some(ConcavityWitness {
                s,
                second_difference: d2,
                noise,
                relative: d2 / scale,
            }))
        })
        .collect::<Result<_, BernsteinError>>()?;
    Ok(found.into_iter().flatten().next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{validate_with, ProblemSpec, Term};
    use std::convert::Infallible;

    fn bypassed(alpha: f64, alpha1: f64) -> MultiTermProblem {
        validate_with(
            &ProblemSpec {
                alpha,
                c: 1.0,
                terms: vec![Term::new(alpha1, 1.0)],
            },
            true,
        )
        .unwrap()
    }

    #[test]
    fn grid_is_log_spaced_with_exact_ends() {
        let g = GridSpec::new(1e-2, 1e2, 5).samples().unwrap();
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[4], 1e2);
        assert!((g[2] - 1.0).abs() < 1e-14);
        assert!(GridSpec::new(1.0, 1.0, 5).samples().is_err());
        assert!(GridSpec::new(1.0, 2.0, 1).samples().is_err());
    }

    #[test]
    fn derivatives_of_a_power() {
        // (s^{3/2})^{(n)} = Π (3/2 − k) s^{3/2 − n}
        let f = |s: f64| Ok::<_, Infallible>(s.powf(1.5));
        for n in 0..=MAX_ORDER {
            let exact: f64 = (0..n).map(|k| 1.5 - k as f64).product::<f64>() * 2f64.powf(1.5 - n as f64);
            let (d, noise) = derivative(&f, 2.0, n).unwrap();
            assert!((d - exact).abs() <= noise.max(1e-12), "n = {n}: {d} vs {exact} (noise {noise})");
            assert!(noise < 1e-3 * exact.abs().max(1.0), "n = {n}: noise {noise}");
        }
    }

    #[test]
    fn exponential_is_cmf() {
        let f = |s: f64| Ok::<_, Infallible>((-s).exp());
        let r = check_cmf(&f, &GridSpec::new(1e-3, 30.0, 40), 6).unwrap();
        assert!(r.verdict.passed, "{}", r.statement());
        assert!(r.statement().starts_with("consistent with"));
    }

    #[test]
    fn sine_is_not_cmf() {
        let f = |s: f64| Ok::<_, Infallible>(s.sin());
        let r = check_cmf(&f, &GridSpec::new(0.1, 20.0, 40), 2).unwrap();
        assert!(!r.verdict.passed);
    }

    #[test]
    fn telegraph_laplace_propagation_is_cmf() {
        let tel = MultiTermProblem::telegraph();
        let f = |s: f64| tel.sqrt_g(Complex64::new(s, 0.0)).map(|q| (-q.re).exp() / s);
        let r = check_cmf(&f, &GridSpec::new(1e-2, 1e2, 41), 4).unwrap();
        assert!(r.verdict.passed, "{}", r.statement());
    }

    #[test]
    fn sqrt_g_is_bernstein_for_valid_problems() {
        for p in [
            MultiTermProblem::two_term(1.9, 1.5).unwrap(),
            MultiTermProblem::classical_wave(),
            MultiTermProblem::telegraph(),
        ] {
            let r = check_bernstein_sqrt_g(&p, &GridSpec::default(), 6).unwrap();
            assert!(r.verdict.passed, "{}", r.statement());
        }
    }

    #[test]
    fn counterexample_fails_bernstein() {
        let r = check_bernstein_sqrt_g(&bypassed(1.9, 0.3), &GridSpec::default(), 2).unwrap();
        assert!(!r.verdict.passed);
        assert_eq!(r.verdict.worst_order, 2);
    }

    #[test]
    fn concavity_scan() {
        let w = check_concavity_scan(&bypassed(1.8, 0.3), &GridSpec::default()).unwrap();
        let w = w.expect("witness");
        assert!(w.second_difference > 0.0 && w.s > 0.1 && w.s < 10.0, "{w:?}");
        assert!(check_concavity_scan(&MultiTermProblem::telegraph(), &GridSpec::default())
            .unwrap()
            .is_none());
        let single = MultiTermProblem::new(1.5, 1.0, &[]).unwrap();
        assert!(check_concavity_scan(&single, &GridSpec::default()).unwrap().is_none());
    }
}
