//! The Mainardi function
//!
//! ```text
//! Φ_β(z) = Σ_{k≥0} (−z)^k / (k! Γ(1 − β − βk)),   0 < β < 1,
//! ```
//!
//! a probability density on `(0, ∞)`, and the single-term subordination
//! kernel `t^{−α/2} Φ_{α/2}(τ t^{−α/2})` built from it.
//!
//! Small arguments use the power series with the reflection formula
//! `1/Γ(1 − x) = Γ(x) sin(πx)/π`. Larger arguments use the
//! Kanter–Zolotarev integral
//!
//! ```text
//! Φ_β(z) = z^{β/(1−β)} / (π(1−β)) ∫₀^π A(φ) exp(−A(φ) z^{1/(1−β)}) dφ,
//! A(φ) = sin(βφ)^{β/(1−β)} sin((1−β)φ) / sin(φ)^{1/(1−β)},
//! ```
//!
//! whose integrand is positive, so there is no cancellation at any `z`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::quadrature::{integrate_adaptive, CompensatedSum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WrightError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("series cancellation too large at z = {z} (max term / sum = {ratio:e})")]
    PrecisionLoss { z: f64, ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WrightMethod {
    Series,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightEval {
    pub beta: f64,
    pub z: f64,
    pub value: f64,
    /// Series terms summed, or integrand evaluations for the integral.
    pub terms_used: usize,
    pub method: WrightMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WrightConfig {
    /// Series for `z ≤ series_radius`, integral beyond.
    pub series_radius: f64,
    /// Largest tolerated `max |term| / |sum|` in the series.
    pub max_cancellation: f64,
}

impl Default for WrightConfig {
    fn default() -> Self {
        WrightConfig {
            series_radius: 1.0,
            max_cancellation: 1e8,
        }
    }
}

pub fn mainardi(beta: f64, z: f64) -> Result<WrightEval, WrightError> {
    mainardi_with(beta, z, &WrightConfig::default())
}

pub fn mainardi_with(beta: f64, z: f64, config: &WrightConfig) -> Result<WrightEval, WrightError> {
    check_args(beta, z)?;
    if z <= config.series_radius {
        mainardi_series(beta, z, config.max_cancellation)
    } else {
        Ok(mainardi_integral(beta, z))
    }
}

fn check_args(beta: f64, z: f64) -> Result<(), WrightError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(WrightError::InvalidArgument(format!("β = {beta} is not in (0, 1)")));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(WrightError::InvalidArgument(format!("z = {z} must be finite and ≥ 0")));
    }
    Ok(())
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0)
}

/// Power series, summed with compensation. Terms at poles of
/// `Γ(1 − β(k+1))` are exactly zero and skipped.
pub fn mainardi_series(beta: f64, z: f64, max_cancellation: f64) -> Result<WrightEval, WrightError> {
    check_args(beta, z)?;
    let mut sum = CompensatedSum::new();
    let mut max_term: f64 = 0.0;
    let mut terms = 0;
    let mut quiet = 0;
    let ln_z = z.ln();
    for k in 0..5000usize {
        let x = beta * (k + 1) as f64;
        if z == 0.0 && k > 0 {
            break;
        }
        if is_integer(x) {
            continue;
        }
        let log_mag = if k == 0 { 0.0 } else { k as f64 * ln_z } + ln_gamma(x) - ln_gamma(k as f64 + 1.0);
        let s = (PI * x).sin();
        let mut term = log_mag.exp() * s / PI;
        if k % 2 == 1 {
            term = -term;
        }
        sum.add(term);
        terms += 1;
        max_term = max_term.max(term.abs());
        // the terms decrease monotonically once k(1−β) outgrows log z
        let past_peak = (k as f64) * (1.0 - beta) > z.max(1.0).ln() + 2.0 && k > 2;
        if past_peak && term.abs() <= 1e-17 * sum.value().abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let value = sum.value();
    let ratio = if value != 0.0 { max_term / value.abs() } else { f64::INFINITY };
    if !(value.is_finite() && ratio <= max_cancellation) {
        return Err(WrightError::PrecisionLoss { z, ratio });
    }
    Ok(WrightEval {
        beta,
        z,
        value,
        terms_used: terms,
        method: WrightMethod::Series,
    })
}

/// Kanter–Zolotarev integral representation.
pub fn mainardi_integral(beta: f64, z: f64) -> WrightEval {
    let p = 1.0 / (1.0 - beta);
    let big_z = z.powf(p);
    let a0 = (1.0 - beta) * beta.powf(beta * p);
    let shape = |phi: f64| -> f64 {
        (beta * phi).sin().powf(beta * p) * ((1.0 - beta) * phi).sin() / phi.sin().powf(p)
    };
    if big_z * a0 - beta * p * z.ln() > 760.0 {
        // below the smallest subnormal
        return WrightEval {
            beta,
            z,
            value: 0.0,
            terms_used: 0,
            method: WrightMethod::Integral,
        };
    }
    // exp(−Z A0) is pulled out of the integral and restored in log space
    let mut evals = 0usize;
    let integrand = |phi: f64| -> f64 {
        evals += 1;
        if phi <= 0.0 || phi >= PI {
            return 0.0;
        }
        let a = shape(phi);
        if !a.is_finite() {
            return 0.0;
        }
        a * (-big_z * (a - a0)).exp()
    };
    // The integrand's bulk sits within O(Z^{-1/2}) of φ = 0; split there.
    let split = (8.0 / big_z.max(1.0).sqrt()).min(PI / 2.0);
    let mut integrand = integrand;
    let left = integrate_adaptive(&mut integrand, 0.0, split, 1e-300, 1e-13, 400);
    let right = integrate_adaptive(&mut integrand, split, PI, 1e-300, 1e-13, 400);
    let integral = left.value + right.value;
    let log_value = beta * p * z.ln() - (PI * (1.0 - beta)).ln() + integral.ln() - big_z * a0;
    WrightEval {
        beta,
        z,
        value: if integral > 0.0 { log_value.exp() } else { 0.0 },
        terms_used: evals,
        method: WrightMethod::Integral,
    }
}

/// `t^{−α/2} Φ_{α/2}(τ t^{−α/2})`, the subordination density of the
/// single-term problem `D^α u = A u` to its cosine family.
pub fn single_term_kernel(alpha: f64, t: f64, tau: f64) -> Result<f64, WrightError> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(WrightError::InvalidArgument(format!("α = {alpha} is not in (1, 2)")));
    }
    if !(t > 0.0) || !(tau >= 0.0) {
        return Err(WrightError::InvalidArgument(format!(
            "need t > 0 and τ ≥ 0 (t = {t}, τ = {tau})"
        )));
    }
    let beta = alpha / 2.0;
    let scale = t.powf(-beta);
    Ok(scale * mainardi(beta, tau * scale)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_oscillatory, QuadratureConfig};
    use proptest::prelude::*;
    use statrs::function::gamma::gamma;

    fn half_closed_form(z: f64) -> f64 {
        (-z * z / 4.0).exp() / PI.sqrt()
    }

    #[test]
    fn value_at_zero() {
        let v = mainardi(0.5, 0.0).unwrap();
        assert!((v.value - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((v.value - 0.564190).abs() < 1e-6);
        for beta in [0.3, 0.75, 0.9] {
            let v = mainardi(beta, 0.0).unwrap().value;
            assert!((v - 1.0 / gamma(1.0 - beta)).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_form_at_one_half() {
        let v = mainardi(0.5, 1.0).unwrap();
        assert!((v.value - 0.439391).abs() < 1e-6);
        for i in 0..=100 {
            let z = 0.1 * i as f64;
            let v = mainardi(0.5, z).unwrap();
            let exact = half_closed_form(z);
            assert!((v.value - exact).abs() <= 1e-12, "z = {z}: {} vs {exact}", v.value);
        }
    }

    // Calibrates the series/integral switch: both branches must reproduce the
    // β = 1/2 closed form around the switch radius, and agree with each other
    // for other β.
    #[test]
    fn switch_radius_calibration() {
        let radius = WrightConfig::default().series_radius;
        for z in [0.25 * radius, 0.5 * radius, radius, 1.25 * radius, 1.5 * radius] {
            let s = mainardi_series(0.5, z, 1e8).unwrap().value;
            let i = mainardi_integral(0.5, z).value;
            let exact = half_closed_form(z);
            assert!((s - exact).abs() < 1e-14, "series z = {z}");
            assert!((i - exact).abs() < 1e-14, "integral z = {z}");
        }
        for beta in [0.55, 0.65, 0.75, 0.85, 0.95] {
            for z in [0.25 * radius, 0.5 * radius, radius] {
                let s = mainardi_series(beta, z, 1e8).unwrap().value;
                let i = mainardi_integral(beta, z).value;
                assert!((s - i).abs() < 1e-13, "β = {beta}, z = {z}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn series_loses_precision_far_out() {
        // β → 1 makes the alternating series useless long before z = 30
        assert!(matches!(
            mainardi_series(0.95, 1.5, 1e8),
            Err(WrightError::PrecisionLoss { .. })
        ));
        assert!(matches!(
            mainardi_series(0.95, 3.0, 1e8),
            Err(WrightError::PrecisionLoss { .. })
        ));
        let v = mainardi(0.95, 1.5).unwrap();
        assert_eq!(v.method, WrightMethod::Integral);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(mainardi(1.0, 0.5).is_err());
        assert!(mainardi(0.5, -1.0).is_err());
        assert!(single_term_kernel(2.0, 1.0, 0.5).is_err());
        assert!(single_term_kernel(1.5, 0.0, 0.5).is_err());
    }

    #[test]
    fn single_term_kernel_examples() {
        let v = single_term_kernel(1.5, 1.0, 0.0).unwrap();
        assert!((v - 1.0 / gamma(0.25)).abs() < 1e-14);
        // scaling: t^{-3/4} Φ(τ t^{-3/4})
        let v = single_term_kernel(1.5, 2.0, 1.0).unwrap();
        let scale = 2f64.powf(-0.75);
        assert!((v - scale * mainardi(0.75, scale).unwrap().value).abs() < 1e-15);
    }

    fn moment(beta: f64, power: i32) -> f64 {
        let p = 1.0 / (1.0 - beta);
        let a0 = (1.0 - beta) * beta.powf(beta * p);
        let cfg = QuadratureConfig {
            grading_exponent: 1.0,
            ..Default::default()
        }
        .with_tol(1e-12);
        integrate_oscillatory(
            |z: f64| z.powi(power) * mainardi(beta, z).unwrap().value,
            |_| 0.0,
            |z| a0 * z.powf(p),
            &cfg,
        )
        .unwrap()
        .value
    }

    #[test]
    fn normalisation_and_first_moment() {
        for beta in [0.6, 0.75, 0.9] {
            assert!((moment(beta, 0) - 1.0).abs() < 1e-8, "β = {beta}");
            assert!((moment(beta, 1) - 1.0 / gamma(1.0 + beta)).abs() < 1e-8, "β = {beta}");
        }
    }

    #[test]
    fn kernel_normalisation() {
        let beta: f64 = 0.75;
        let p = 1.0 / (1.0 - beta);
        let a0 = (1.0 - beta) * beta.powf(beta * p);
        let res = integrate_oscillatory(
            |tau: f64| single_term_kernel(1.5, 1.0, tau).unwrap(),
            |_| 0.0,
            |tau| a0 * tau.powf(p),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((res.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mass_concentrates_as_alpha_approaches_two() {
        // share of the mass within 0.2 of τ = t grows as α → 2
        let window_mass = |alpha: f64| {
            integrate_adaptive(
                |tau: f64| single_term_kernel(alpha, 1.0, tau).unwrap(),
                0.8,
                1.2,
                1e-10,
                1e-10,
                200,
            )
            .value
        };
        let masses: Vec<f64> = [1.6, 1.8, 1.95, 1.99].iter().map(|&a| window_mass(a)).collect();
        for w in masses.windows(2) {
            assert!(w[1] > w[0], "{masses:?}");
        }
        assert!(masses[3] > 0.9);
    }

    proptest! {
        #[test]
        fn nonnegative(bi in 0usize..5, z in 0.0f64..20.0) {
            let beta = [0.55, 0.65, 0.75, 0.85, 0.95][bi];
            let v = mainardi(beta, z).unwrap();
            prop_assert!(v.value >= 0.0);
            prop_assert!(v.value.is_finite());
        }

        #[test]
        fn matches_half_closed_form(z in 0.0f64..10.0) {
            let v = mainardi(0.5, z).unwrap().value;
            prop_assert!((v - half_closed_form(z)).abs() <= 1e-12);
        }
    }
}
