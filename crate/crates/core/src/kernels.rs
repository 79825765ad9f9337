//! Propagation function, fundamental solutions and subordination densities.
//!
//! With `S(s) = g(s)^p` (`p = 1/2` for `w`, `G_s`, `G_c`, `φ`, and `p = 1/α`
//! for `ψ`) and `S(ir) = S⁺(r) + i S⁻(r)`:
//!
//! ```text
//! w(x,t)   = 1/2 + (1/π) ∫₀^∞ e^{−xS⁺} sin(rt − xS⁻) dr/r
//! G_s(x,t) = w_t = (1/π) ∫₀^∞ e^{−xS⁺} cos(rt − xS⁻) dr
//! φ(t,τ)   = −w_x|_{x=τ} = (1/π) ∫₀^∞ e^{−τS⁺} (S⁺ sin ψ + S⁻ cos ψ) dr/r,  ψ = rt − τS⁻
//! G_c(x,t) = φ(t,|x|)/2
//! ```
//!
//! and `ψ(t,τ)` is the last integral with `p = 1/α`.
//!
//! When `αp = 1` the symbol is `S(s) = κs + h(s)` with `κ = c^p`, so every
//! kernel carries the delay `e^{−κxs}` and vanishes beyond `x = t/κ`. If in
//! addition `h(s) → h∞` stays bounded (the classical wave and telegraph
//! equations for `p = 1/2`, a single lower term of order `α − 1` for
//! `p = 1/α`) the densities carry a point mass on the front, and the integrals
//! above stop decaying. They are then split as
//!
//! ```text
//! L{φ(·,τ)}(s) = e^{−κτs} [κ e^{−τh∞} + ((S/s) e^{−τh} − κ e^{−τh∞})]
//! ```
//!
//! and only the bracketed regular part is integrated; its symbol decays like
//! `1/r` and the alternating tail is summed by acceleration. [`phi_atom`] and
//! friends return the point masses.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::{MultiTermProblem, ProblemError, WaveClass};
use crate::quadrature::{
    integrate_adaptive, integrate_oscillatory, inverse_laplace_oracle, CompensatedSum, LaplaceConfig,
    QuadratureConfig, QuadratureError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("ψ is the unit point mass at τ = {location} (single-term problem), not a density")]
    DegenerateIdentity { location: f64 },
    #[error("coordinate sits exactly on the wavefront (x = t/κ = {0}); the kernel jumps there")]
    AtWavefront(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    PropagationW,
    DwDt,
    MinusDwDx,
    #[serde(rename = "G_c")]
    Gc,
    #[serde(rename = "G_s")]
    Gs,
    Phi,
    Psi,
}

impl KernelKind {
    pub const ALL: [KernelKind; 7] = [
        KernelKind::PropagationW,
        KernelKind::DwDt,
        KernelKind::MinusDwDx,
        KernelKind::Gc,
        KernelKind::Gs,
        KernelKind::Phi,
        KernelKind::Psi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::PropagationW => "propagation_w",
            KernelKind::DwDt => "dw_dt",
            KernelKind::MinusDwDx => "minus_dw_dx",
            KernelKind::Gc => "G_c",
            KernelKind::Gs => "G_s",
            KernelKind::Phi => "phi",
            KernelKind::Psi => "psi",
        }
    }

    pub fn parse(name: &str) -> Option<KernelKind> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

/// A kernel value with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub error_estimate: f64,
    pub truncation_point: f64,
    pub panels: usize,
    pub converged: bool,
    /// Set when the error estimate exceeds ten times the requested tolerance.
    pub low_confidence: bool,
}

impl KernelValue {
    fn exact(value: f64) -> Self {
        KernelValue {
            value,
            error_estimate: 0.0,
            truncation_point: 0.0,
            panels: 0,
            converged: true,
            low_confidence: false,
        }
    }

    fn scaled(mut self, factor: f64, shift: f64) -> Self {
        self.value = factor * self.value + shift;
        self.error_estimate *= factor.abs();
        self
    }
}

/// A point mass `weight·δ(· − location)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Which root of the symbol a kernel is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Power {
    Half,
    InverseAlpha,
}

#[derive(Debug, Clone, Copy)]
struct Front {
    /// Delay coefficient `κ`; the front sits at `x = t/κ`.
    kappa: f64,
    /// `lim h(s)` when bounded.
    h_inf: Option<f64>,
}

struct Root<'a> {
    problem: &'a MultiTermProblem,
    power: Power,
    front: Option<Front>,
}

impl<'a> Root<'a> {
    fn new(problem: &'a MultiTermProblem, power: Power) -> Self {
        let alpha = problem.alpha();
        let linear = match power {
            Power::Half => alpha == 2.0,
            Power::InverseAlpha => true,
        };
        let front = linear.then(|| {
            let p = 1.0 / alpha;
            let kappa = problem.c().powf(p);
            let terms = problem.terms();
            let h_inf = match terms {
                [] => Some(0.0),
                [only] if only.order == alpha - 1.0 => {
                    Some(only.coeff * problem.c().powf(p - 1.0) * p)
                }
                _ => None,
            };
            Front { kappa, h_inf }
        });
        Root {
            problem,
            power,
            front,
        }
    }

    fn exponent(&self) -> f64 {
        match self.power {
            Power::Half => 0.5,
            Power::InverseAlpha => 1.0 / self.problem.alpha(),
        }
    }

    /// `(S⁺, S⁻)` at `ir`.
    fn pair(&self, r: f64) -> (f64, f64) {
        match self.power {
            Power::Half => {
                let k = self.problem.k_eval(r);
                (k.k_plus, k.k_minus)
            }
            Power::InverseAlpha => self.problem.polar_root(r, 1.0 / self.problem.alpha()),
        }
    }

    /// `S(s) − κs`, evaluated as `κ s ((1 + ε)^p − 1)` with
    /// `ε = Σ (c_j/c) s^{α_j − α}` to avoid cancellation.
    fn excess(&self, s: Complex64, kappa: f64) -> Complex64 {
        let p = self.problem;
        let eps: Complex64 = p
            .terms()
            .iter()
            .map(|t| (t.coeff / p.c()) * s.powf(t.order - p.alpha()))
            .sum();
        kappa * s * pow1m(eps, 1.0 / p.alpha())
    }

    /// `S(s)` anywhere in the cut plane.
    fn laplace(&self, s: Complex64) -> Result<Complex64, ProblemError> {
        self.problem.g_pow(s, self.exponent())
    }
}

/// `(1 + ε)^p − 1` without cancellation for small `ε`.
fn pow1m(eps: Complex64, p: f64) -> Complex64 {
    // log(1 + ε) = ½ log1p(2 Re ε + |ε|²) + i arg(1 + ε)
    let re = 0.5 * (2.0 * eps.re + eps.norm_sqr()).ln_1p();
    let im = eps.im.atan2(1.0 + eps.re);
    let w = Complex64::new(re, im) * p;
    let (sb, cb) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * cb - 2.0 * half * half, w.re.exp() * sb)
}

fn effective_config(p: &MultiTermProblem, config: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        grading_exponent: config.grading_exponent.max(2.0 / p.min_order()),
        ..*config
    }
}

fn finish(result: crate::quadrature::QuadratureResult, config: &QuadratureConfig) -> KernelValue {
    KernelValue {
        value: result.value / PI,
        error_estimate: result.error_estimate / PI,
        truncation_point: result.truncation_point,
        panels: result.panels_used,
        converged: result.converged,
        low_confidence: !result.converged || result.error_estimate / PI > 10.0 * config.target(result.value / PI),
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), KernelError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("{name} = {v} must be positive")));
    }
    Ok(())
}

fn check_nonnegative(name: &str, v: f64) -> Result<(), KernelError> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("{name} = {v} must be ≥ 0")));
    }
    Ok(())
}

/// `w(x,t)`. For `α = 2` the value is exactly `0` beyond the front `x > t/√c`.
pub fn propagation_w(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    propagation_w_impl(p, x, t, config, true)
}

/// `w(x,t)` from the integral even where the front guarantees `w = 0`.
pub fn propagation_w_uncut(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    propagation_w_impl(p, x, t, config, false)
}

fn propagation_w_impl(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
    cutoff: bool,
) -> Result<KernelValue, KernelError> {
    check_nonnegative("x", x)?;
    check_positive("t", t)?;
    if x == 0.0 {
        return Ok(KernelValue::exact(1.0));
    }
    let root = Root::new(p, Power::Half);
    if let Some(front) = root.front {
        if cutoff && front.kappa * x > t {
            return Ok(KernelValue::exact(0.0));
        }
        if front.kappa * x == t && front.h_inf.is_some() {
            return Err(KernelError::AtWavefront(x));
        }
    }
    let cfg = effective_config(p, config);
    let res = integrate_oscillatory(
        |r| {
            let (sp, sm) = root.pair(r);
            (-x * sp).exp() * (r * t - x * sm).sin() / r
        },
        |r| r * t - x * root.pair(r).1,
        |r| x * root.pair(r).0,
        &cfg,
    )?;
    Ok(finish(res, &cfg).scaled(1.0, 0.5))
}

/// `ln w(x,t)` for `α < 2`, accurate where `w` is far below `f64` resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub ln_value: f64,
    /// Real saddle point `s*` of `st − x√g(s)`.
    pub saddle: f64,
    /// Relative error estimate of `e^{ln_value}`.
    pub rel_error: f64,
}

/// `ln w(x,t)` from the Bromwich integral along `Re s = s*`:
///
/// ```text
/// w = e^{Φ(s*)} (1/π) ∫₀^∞ Re[e^{Φ(s*+iy) − Φ(s*)} / (s*+iy)] dy,   Φ(s) = st − x√g(s)
/// ```
///
/// where `s*` solves `(√g)'(s*) = t/x`. Factoring out `e^{Φ(s*)}` leaves an
/// `O(1)` integral, so `w` is resolved even when it underflows. Since `√g`
/// is a Bernstein function, `Re √g(s*+iy) ≥ √g(s*)` and the integrand is
/// bounded by `1/|s|`, decaying like `e^{−x(Re√g − √g(s*))}`.
pub fn propagation_w_log(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<LogValue, KernelError> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    if p.alpha() >= 2.0 {
        return Err(KernelError::InvalidArgument(
            "the saddle-point form needs α < 2 (no front)".into(),
        ));
    }
    let root = |s: f64| p.sqrt_g(Complex64::new(s, 0.0)).map(|v| v.re);
    // (√g)' = g'/(2√g) decreases from ∞ to 0
    let slope = |s: f64| -> Result<f64, ProblemError> {
        let z = Complex64::new(s, 0.0);
        Ok(p.g_derivative(z)?.re / (2.0 * root(s)?))
    };
    let target = t / x;
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    while slope(lo)? < target {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(KernelError::InvalidArgument("no saddle point".into()));
        }
    }
    while slope(hi)? > target {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(KernelError::InvalidArgument("no saddle point".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if slope(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let saddle = (lo * hi).sqrt();
    let root_star = root(saddle)?;
    let phi_star = saddle * t - x * root_star;
    let integrand = |y: f64| -> f64 {
        let s = Complex64::new(saddle, y);
        match p.sqrt_g(s) {
            Ok(q) => {
                let e = s * t - x * q - phi_star;
                (e.exp() / s).re
            }
            Err(_) => f64::NAN,
        }
    };
    let bound = |y: f64| -> f64 {
        let s = Complex64::new(saddle, y);
        p.sqrt_g(s).map_or(f64::NAN, |q| (-x * (q.re - root_star)).exp() / s.norm())
    };
    // curvature of Φ along the line sets the width of the central peak
    let h = 1e-4 * saddle;
    let second = (root(saddle + h)? - 2.0 * root_star + root(saddle - h)?) / (h * h);
    let width = (x * second.abs()).sqrt().recip().min(1e3 * saddle).max(1e-6 * saddle);
    let tol = config.rel_tol.max(1e-13);
    let mut total = CompensatedSum::new();
    let mut error = 0.0;
    let (mut a, mut b) = (0.0, width);
    for _ in 0..200 {
        let part = integrate_adaptive(integrand, a, b, 0.0, tol, 200);
        if !part.value.is_finite() {
            return Err(KernelError::InvalidArgument(format!(
                "non-finite Bromwich integrand near y = {b}"
            )));
        }
        total.add(part.value);
        error += part.error;
        let scale = total.value().abs().max(f64::MIN_POSITIVE);
        if bound(b) * b < 1e-17 * scale {
            break;
        }
        a = b;
        b *= 2.0;
    }
    let j = total.value() / PI;
    if !(j > 0.0) {
        return Err(KernelError::Quadrature(QuadratureError::NoConvergence {
            value: j,
            error_estimate: error / PI,
            panels: 0,
            truncation_point: b,
        }));
    }
    Ok(LogValue {
        ln_value: phi_star + j.ln(),
        saddle,
        rel_error: error / PI / j,
    })
}

/// `G_s(x,t) = w_t(x,t)`, the regular part when the problem has a front.
pub fn signaling_gs(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    signaling_gs_impl(p, x, t, config, true)
}

pub fn signaling_gs_uncut(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    signaling_gs_impl(p, x, t, config, false)
}

fn signaling_gs_impl(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
    cutoff: bool,
) -> Result<KernelValue, KernelError> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    let root = Root::new(p, Power::Half);
    let cfg = effective_config(p, config);
    if let Some(front) = root.front {
        if cutoff && front.kappa * x > t {
            return Ok(KernelValue::exact(0.0));
        }
        if let Some(h_inf) = front.h_inf {
            let delta = t - front.kappa * x;
            if delta == 0.0 {
                return Err(KernelError::AtWavefront(x));
            }
            if p.m() == 0 {
                return Ok(KernelValue::exact(0.0));
            }
            let atom = (-x * h_inf).exp();
            let res = integrate_oscillatory(
                |r| {
                    let s = Complex64::new(0.0, r);
                    let bracket = (-x * root.excess(s, front.kappa)).exp() - atom;
                    let (sn, cs) = (r * delta).sin_cos();
                    cs * bracket.re - sn * bracket.im
                },
                |r| r * delta,
                |_| 0.0,
                &cfg,
            )?;
            return Ok(finish(res, &cfg));
        }
    }
    let res = integrate_oscillatory(
        |r| {
            let (sp, sm) = root.pair(r);
            (-x * sp).exp() * (r * t - x * sm).cos()
        },
        |r| r * t - x * root.pair(r).1,
        |r| x * root.pair(r).0,
        &cfg,
    )?;
    Ok(finish(res, &cfg))
}

/// Point mass of `G_s(x,·)` on the front `t = √c x`, if any.
pub fn gs_atom(p: &MultiTermProblem, x: f64) -> Option<Atom> {
    let front = Root::new(p, Power::Half).front?;
    let h_inf = front.h_inf?;
    Some(Atom {
        location: front.kappa * x,
        weight: (-x * h_inf).exp(),
    })
}

/// `φ(t,τ)`, the density of the subordinator to the cosine family
/// (its regular part when the problem has a front).
pub fn pdf_phi(
    p: &MultiTermProblem,
    t: f64,
    tau: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    density(&Root::new(p, Power::Half), t, tau, config, true)
}

pub fn pdf_phi_uncut(
    p: &MultiTermProblem,
    t: f64,
    tau: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    density(&Root::new(p, Power::Half), t, tau, config, false)
}

/// Point mass of `φ(t,·)` at `τ = t/√c`: weight `e^{−h∞ t/√c}`.
pub fn phi_atom(p: &MultiTermProblem, t: f64) -> Option<Atom> {
    atom_of(&Root::new(p, Power::Half), t)
}

/// `ψ(t,τ)`, the density subordinating the solution operator to that of
/// the single-term problem `c D^α u = A u`.
pub fn pdf_psi(
    p: &MultiTermProblem,
    t: f64,
    tau: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    psi_impl(p, t, tau, config, true)
}

pub fn pdf_psi_uncut(
    p: &MultiTermProblem,
    t: f64,
    tau: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    psi_impl(p, t, tau, config, false)
}

fn psi_impl(
    p: &MultiTermProblem,
    t: f64,
    tau: f64,
    config: &QuadratureConfig,
    cutoff: bool,
) -> Result<KernelValue, KernelError> {
    if p.m() == 0 {
        return Err(KernelError::DegenerateIdentity {
            location: t / p.c().powf(1.0 / p.alpha()),
        });
    }
    density(&Root::new(p, Power::InverseAlpha), t, tau, config, cutoff)
}

pub fn psi_atom(p: &MultiTermProblem, t: f64) -> Option<Atom> {
    if p.m() == 0 {
        return None;
    }
    atom_of(&Root::new(p, Power::InverseAlpha), t)
}

fn atom_of(root: &Root, t: f64) -> Option<Atom> {
    let front = root.front?;
    let h_inf = front.h_inf?;
    let location = t / front.kappa;
    Some(Atom {
        location,
        weight: (-h_inf * location).exp(),
    })
}

fn density(
    root: &Root,
    t: f64,
    tau: f64,
    config: &QuadratureConfig,
    cutoff: bool,
) -> Result<KernelValue, KernelError> {
    check_positive("t", t)?;
    check_nonnegative("τ", tau)?;
    let p = root.problem;
    let cfg = effective_config(p, config);
    if let Some(front) = root.front {
        if cutoff && front.kappa * tau > t {
            return Ok(KernelValue::exact(0.0));
        }
        if let Some(h_inf) = front.h_inf {
            let delta = t - front.kappa * tau;
            if delta == 0.0 {
                return Err(KernelError::AtWavefront(tau));
            }
            if p.m() == 0 {
                return Ok(KernelValue::exact(0.0));
            }
            let kappa = front.kappa;
            let tail = kappa * (-tau * h_inf).exp();
            let res = integrate_oscillatory(
                |r| {
                    let s = Complex64::new(0.0, r);
                    let h = root.excess(s, kappa);
                    // S/s = κ + h/s
                    let bracket = (kappa + h / s) * (-tau * h).exp() - tail;
                    let (sn, cs) = (r * delta).sin_cos();
                    cs * bracket.re - sn * bracket.im
                },
                |r| r * delta,
                |_| 0.0,
                &cfg,
            )?;
            return Ok(finish(res, &cfg));
        }
    }
    let res = integrate_oscillatory(
        |r| {
            let (sp, sm) = root.pair(r);
            let psi = r * t - tau * sm;
            let (sn, cs) = psi.sin_cos();
            (-tau * sp).exp() * (sp * sn + sm * cs) / r
        },
        |r| r * t - tau * root.pair(r).1,
        |r| tau * root.pair(r).0,
        &cfg,
    )?;
    Ok(finish(res, &cfg))
}

/// `G_c(x,t) = φ(t,|x|)/2`.
pub fn cauchy_gc(
    p: &MultiTermProblem,
    x: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    if !x.is_finite() {
        return Err(KernelError::InvalidArgument(format!("x = {x} must be finite")));
    }
    Ok(pdf_phi(p, t, x.abs(), config)?.scaled(0.5, 0.0))
}

/// Point masses of `G_c(·,t)` at `x = ±t/√c`.
pub fn gc_atoms(p: &MultiTermProblem, t: f64) -> Vec<Atom> {
    match phi_atom(p, t) {
        Some(a) => vec![
            Atom {
                location: -a.location,
                weight: 0.5 * a.weight,
            },
            Atom {
                location: a.location,
                weight: 0.5 * a.weight,
            },
        ],
        None => Vec::new(),
    }
}

/// The support bound of `φ(t,·)`: `t/√c` for `α = 2`, unbounded otherwise.
pub fn phi_support(p: &MultiTermProblem, t: f64) -> Option<f64> {
    Root::new(p, Power::Half).front.map(|f| t / f.kappa)
}

/// The support bound `t/c^{1/α}` of `ψ(t,·)`.
pub fn psi_support(p: &MultiTermProblem, t: f64) -> f64 {
    t / p.c().powf(1.0 / p.alpha())
}

/// A kernel evaluated at `(x or τ, t)`.
pub fn evaluate(
    p: &MultiTermProblem,
    kind: KernelKind,
    space: f64,
    t: f64,
    config: &QuadratureConfig,
) -> Result<KernelValue, KernelError> {
    match kind {
        KernelKind::PropagationW => propagation_w(p, space, t, config),
        KernelKind::DwDt | KernelKind::Gs => signaling_gs(p, space, t, config),
        KernelKind::MinusDwDx | KernelKind::Phi => pdf_phi(p, t, space, config),
        KernelKind::Gc => cauchy_gc(p, space, t, config),
        KernelKind::Psi => pdf_psi(p, t, space, config),
    }
}

/// The closed-form Laplace transform in `t` of a kernel at fixed `x` (or `τ`).
pub fn laplace_transform(
    p: &MultiTermProblem,
    kind: KernelKind,
    space: f64,
    s: Complex64,
) -> Result<Complex64, ProblemError> {
    let root_half = || p.sqrt_g(s);
    Ok(match kind {
        KernelKind::PropagationW => (-space * root_half()?).exp() / s,
        KernelKind::DwDt | KernelKind::Gs => (-space * root_half()?).exp(),
        KernelKind::MinusDwDx | KernelKind::Phi => {
            let q = root_half()?;
            q / s * (-space * q).exp()
        }
        KernelKind::Gc => {
            let q = root_half()?;
            0.5 * q / s * (-space.abs() * q).exp()
        }
        KernelKind::Psi => {
            let l = Root::new(p, Power::InverseAlpha).laplace(s)?;
            l / s * (-space * l).exp()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub kind: KernelKind,
    pub space: f64,
    pub t: f64,
    pub real_axis: f64,
    pub real_axis_error: f64,
    pub contour: f64,
    pub contour_error: f64,
    pub contour_nodes: usize,
    pub discrepancy: f64,
}

/// Evaluates a kernel from its real-axis integral and by numerical inversion
/// of its Laplace transform along a Talbot-type contour.
pub fn laplace_cross_check(
    p: &MultiTermProblem,
    kind: KernelKind,
    space: f64,
    t: f64,
    config: &QuadratureConfig,
    laplace: &LaplaceConfig,
) -> Result<CrossCheck, KernelError> {
    let direct = evaluate(p, kind, space, t, config)?;
    let inv = inverse_laplace_oracle(|s| laplace_transform(p, kind, space, s), t, laplace)?;
    Ok(CrossCheck {
        kind,
        space,
        t,
        real_axis: direct.value,
        real_axis_error: direct.error_estimate,
        contour: inv.value,
        contour_error: inv.error_estimate,
        contour_nodes: inv.nodes,
        discrepancy: (direct.value - inv.value).abs(),
    })
}

/// Which coordinate is held fixed in a [`KernelField`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slice {
    /// Grid runs over `x` (or `τ`).
    FixedT(f64),
    /// Grid runs over `t`; the fixed value is `x` (or `τ`).
    FixedSpace(f64),
}

/// A kernel tabulated over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelField {
    pub kind: KernelKind,
    pub problem: MultiTermProblem,
    pub slice: Slice,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub truncation_points: Vec<f64>,
    pub converged: Vec<bool>,
    pub low_confidence: Vec<bool>,
    /// Point masses on the front, in grid coordinates.
    pub atoms: Vec<Atom>,
}

impl KernelField {
    /// CSV with `#` comment lines (the given provenance, then the atoms),
    /// a header row and 17 significant digits.
    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("# kind: {}\n", self.kind.name()));
        match self.slice {
            Slice::FixedT(t) => out.push_str(&format!("# slice: t = {t:.16e}\n")),
            Slice::FixedSpace(x) => out.push_str(&format!("# slice: x = {x:.16e}\n")),
        }
        for a in &self.atoms {
            out.push_str(&format!(
                "# atom: location = {:.16e}, weight = {:.16e}\n",
                a.location, a.weight
            ));
        }
        out.push_str("coordinate,value,error_estimate,truncation_point,converged\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                self.grid[i], self.values[i], self.error_estimates[i], self.truncation_points[i], self.converged[i]
            ));
        }
        out
    }
}

/// Point masses of a kernel for the given slice, in grid coordinates.
pub fn atoms(p: &MultiTermProblem, kind: KernelKind, slice: Slice) -> Vec<Atom> {
    let power = match kind {
        KernelKind::PropagationW => return Vec::new(),
        KernelKind::Psi if p.m() == 0 => return Vec::new(),
        KernelKind::Psi => Power::InverseAlpha,
        _ => Power::Half,
    };
    let Some(Front {
        kappa,
        h_inf: Some(h_inf),
    }) = Root::new(p, power).front
    else {
        return Vec::new();
    };
    let signaling = matches!(kind, KernelKind::DwDt | KernelKind::Gs);
    let single = match (signaling, slice) {
        (true, Slice::FixedSpace(x)) => Atom {
            location: kappa * x,
            weight: (-x * h_inf).exp(),
        },
        (true, Slice::FixedT(t)) => Atom {
            location: t / kappa,
            weight: (-h_inf * t / kappa).exp() / kappa,
        },
        (false, Slice::FixedT(t)) => Atom {
            location: t / kappa,
            weight: (-h_inf * t / kappa).exp(),
        },
        (false, Slice::FixedSpace(tau)) => Atom {
            location: kappa * tau.abs(),
            weight: kappa * (-tau.abs() * h_inf).exp(),
        },
    };
    match (kind, slice) {
        (KernelKind::Gc, Slice::FixedT(_)) => vec![
            Atom {
                location: -single.location,
                weight: 0.5 * single.weight,
            },
            Atom {
                location: single.location,
                weight: 0.5 * single.weight,
            },
        ],
        (KernelKind::Gc, Slice::FixedSpace(_)) => vec![Atom {
            weight: 0.5 * single.weight,
            ..single
        }],
        _ => vec![single],
    }
}

/// Tabulates a kernel over a grid, evaluating the points in parallel.
pub fn evaluate_field(
    p: &MultiTermProblem,
    kind: KernelKind,
    slice: Slice,
    grid: &[f64],
    config: &QuadratureConfig,
) -> Result<KernelField, KernelError> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KernelError::InvalidArgument("grid must be strictly increasing".into()));
    }
    let values: Vec<KernelValue> = grid
        .par_iter()
        .map(|&g| {
            let (space, t) = match slice {
                Slice::FixedT(t) => (g, t),
                Slice::FixedSpace(x) => (x, g),
            };
            match evaluate(p, kind, space, t, config) {
                Err(KernelError::AtWavefront(_)) => Ok(KernelValue {
                    value: f64::NAN,
                    error_estimate: f64::INFINITY,
                    truncation_point: 0.0,
                    panels: 0,
                    converged: false,
                    low_confidence: true,
                }),
                other => other,
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(KernelField {
        kind,
        problem: p.clone(),
        slice,
        grid: grid.to_vec(),
        values: values.iter().map(|v| v.value).collect(),
        error_estimates: values.iter().map(|v| v.error_estimate).collect(),
        truncation_points: values.iter().map(|v| v.truncation_point).collect(),
        converged: values.iter().map(|v| v.converged).collect(),
        low_confidence: values.iter().map(|v| v.low_confidence).collect(),
        atoms: atoms(p, kind, slice),
    })
}

/// Total mass of a density over its whole range, split into the
/// continuous part, the point masses and (for `G_s`) the analytic tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub kind: KernelKind,
    /// `t` for `φ`, `ψ`, `G_c`; `x` for `G_s`.
    pub fixed: f64,
    pub continuous: f64,
    pub atoms: f64,
    /// Contribution beyond the integrated range, from the small-`s`
    /// expansion of the transform.
    pub tail: f64,
    pub total: f64,
    pub error_estimate: f64,
}

fn mass_of<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64), KernelError>
where
    F: FnMut(f64) -> Result<f64, KernelError>,
{
    let mut failure = None;
    let res = crate::quadrature::integrate_adaptive(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        tol,
        tol,
        200,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok((res.value, res.error)),
    }
}

/// `∫ φ(t,τ) dτ`, `∫ ψ(t,τ) dτ` or `∫ G_c(x,t) dx` including point masses.
pub fn density_mass(
    p: &MultiTermProblem,
    kind: KernelKind,
    t: f64,
    config: &QuadratureConfig,
) -> Result<MassReport, KernelError> {
    check_positive("t", t)?;
    let tol = 0.1 * config.abs_tol.max(1e-13);
    let (support, atom, eval): (Option<f64>, f64, Box<dyn Fn(f64) -> Result<f64, KernelError> + Sync>) = match kind {
        KernelKind::Phi | KernelKind::MinusDwDx => (
            phi_support(p, t),
            phi_atom(p, t).map_or(0.0, |a| a.weight),
            Box::new(move |tau| Ok(pdf_phi(p, t, tau, config)?.value)),
        ),
        // both halves of the real line, by evenness
        KernelKind::Gc => (
            phi_support(p, t),
            gc_atoms(p, t).iter().map(|a| a.weight).sum(),
            Box::new(move |x| Ok(2.0 * cauchy_gc(p, x, t, config)?.value)),
        ),
        KernelKind::Psi => {
            if p.m() == 0 {
                return Err(KernelError::DegenerateIdentity {
                    location: psi_support(p, t),
                });
            }
            (
                Some(psi_support(p, t)),
                psi_atom(p, t).map_or(0.0, |a| a.weight),
                Box::new(move |tau| Ok(pdf_psi(p, t, tau, config)?.value)),
            )
        }
        other => {
            return Err(KernelError::InvalidArgument(format!(
                "{} is not a density in the space variable",
                other.name()
            )))
        }
    };
    let (continuous, error) = match support {
        Some(b) => mass_of(&eval, 0.0, b, tol)?,
        None => {
            // march outwards over doubling intervals from the natural scale t^{α/2}/√c
            let scale = t.powf(p.alpha() / 2.0) / p.c().sqrt();
            let mut total = crate::quadrature::CompensatedSum::new();
            let mut error = 0.0;
            let (mut a, mut b) = (0.0, scale);
            let mut quiet = 0;
            for _ in 0..80 {
                let (v, e) = mass_of(&eval, a, b, tol)?;
                total.add(v);
                error += e;
                // values below the quadrature tolerance are noise
                let floor = 2.0 * config.abs_tol;
                if v.abs() <= 1e-13 + floor * (b - a) && eval(b)?.abs() <= floor {
                    quiet += 1;
                    if quiet >= 2 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                a = b;
                b *= 2.0;
            }
            (total.value(), error)
        }
    };
    Ok(MassReport {
        kind,
        fixed: t,
        continuous,
        atoms: atom,
        tail: 0.0,
        total: continuous + atom,
        error_estimate: error,
    })
}

/// `∫₀^∞ G_s(x,t) dt`.
///
/// `G_s(x,·)` has a power-law tail `t^{−1−α_m/2}`, too slow to integrate out
/// and too small to evaluate accurately at very large `t`. The integral is
/// taken up to `T` and the rest, `∫_T^∞ G_s dt`, comes from the small-`s`
/// expansion `e^{−x√g(s)} = Σ a_k s^{ν_k}` via `L^{−1}{s^ν} = t^{−ν−1}/Γ(−ν)`:
/// `∫_T^∞ G_s dt ≈ −Σ a_k T^{−ν_k}/Γ(1 − ν_k)`.
pub fn signaling_mass(
    p: &MultiTermProblem,
    x: f64,
    horizon: f64,
    config: &QuadratureConfig,
) -> Result<MassReport, KernelError> {
    check_positive("x", x)?;
    check_positive("horizon", horizon)?;
    let tol = 0.1 * config.abs_tol.max(1e-13);
    let atom = gs_atom(p, x);
    let start = atom.map_or(0.0, |a| a.location);
    if let Some(front) = Root::new(p, Power::Half).front {
        if horizon <= front.kappa * x {
            return Err(KernelError::InvalidArgument(format!(
                "horizon {horizon} lies before the front at t = {}",
                front.kappa * x
            )));
        }
    }
    let eval = |t: f64| Ok(signaling_gs(p, x, t, config)?.value);
    // geometric breakpoints resolve the early rise and the slow decay alike
    let mut points = vec![start];
    let mut b = if start > 0.0 { 2.0 * start } else { (x * x).min(1.0) * 1e-3 };
    while b < horizon {
        points.push(b);
        b *= 2.0;
    }
    points.push(horizon);
    let mut total = crate::quadrature::CompensatedSum::new();
    let mut error = 0.0;
    for w in points.windows(2) {
        let (v, e) = mass_of(eval, w[0], w[1], tol)?;
        total.add(v);
        error += e;
    }
    let tail = signaling_tail(p, x, horizon);
    let continuous = total.value();
    let atoms = atom.map_or(0.0, |a| a.weight);
    Ok(MassReport {
        kind: KernelKind::Gs,
        fixed: x,
        continuous,
        atoms,
        tail,
        total: continuous + atoms + tail,
        error_estimate: error,
    })
}

/// Truncated generalized power series `Σ a_k s^{ν_k}` with exponents `≤ cap`.
#[derive(Debug, Clone)]
struct PowerSeries {
    terms: Vec<(f64, f64)>,
    cap: f64,
}

impl PowerSeries {
    fn constant(v: f64, cap: f64) -> Self {
        PowerSeries {
            terms: vec![(0.0, v)],
            cap,
        }
    }

    fn normalise(mut terms: Vec<(f64, f64)>, cap: f64) -> Self {
        terms.retain(|&(e, c)| e <= cap + 1e-12 && c != 0.0);
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (e, c) in terms {
            match merged.last_mut() {
                Some(last) if (last.0 - e).abs() < 1e-12 => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        PowerSeries { terms: merged, cap }
    }

    fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let mut out = Vec::new();
        for &(e1, c1) in &self.terms {
            for &(e2, c2) in &other.terms {
                out.push((e1 + e2, c1 * c2));
            }
        }
        PowerSeries::normalise(out, self.cap)
    }

    fn add_scaled(&self, other: &PowerSeries, k: f64) -> PowerSeries {
        let mut out = self.terms.clone();
        out.extend(other.terms.iter().map(|&(e, c)| (e, k * c)));
        PowerSeries::normalise(out, self.cap)
    }

    fn min_exponent(&self) -> f64 {
        self.terms.first().map_or(f64::INFINITY, |t| t.0)
    }

    /// `Σ_n coeffs[n] X^n` for a series `X` without constant term.
    fn compose(&self, mut coeffs: impl FnMut(usize) -> f64) -> PowerSeries {
        let lowest = self.min_exponent();
        let order = if lowest > 0.0 { (self.cap / lowest).floor() as usize + 1 } else { 0 };
        let mut out = PowerSeries::constant(coeffs(0), self.cap);
        let mut power = PowerSeries::constant(1.0, self.cap);
        for n in 1..=order {
            power = power.mul(self);
            out = out.add_scaled(&power, coeffs(n));
        }
        out
    }
}

/// `∫_T^∞ G_s(x,t) dt` from the small-`s` expansion of `e^{−x√g(s)}`.
fn signaling_tail(p: &MultiTermProblem, x: f64, horizon: f64) -> f64 {
    let cap = 8.0;
    let base = p.min_order();
    let lead = p.terms().last().map_or(p.c(), |t| t.coeff);
    // g(s) = lead s^{α_m} (1 + ε(s))
    let mut eps = vec![];
    if p.m() > 0 {
        eps.push((p.alpha() - base, p.c() / lead));
        for t in &p.terms()[..p.m() - 1] {
            eps.push((t.order - base, t.coeff / lead));
        }
    }
    let eps = PowerSeries::normalise(eps, cap);
    // (1 + ε)^{1/2}
    let root = eps.compose(|n| {
        let mut b = 1.0;
        for k in 0..n {
            b *= (0.5 - k as f64) / (k + 1) as f64;
        }
        b
    });
    // X = −x √lead s^{α_m/2} (1 + ε)^{1/2}
    let shift = PowerSeries {
        terms: vec![(base / 2.0, -x * lead.sqrt())],
        cap,
    };
    let exponent = shift.mul(&root);
    let mut factorial = 1.0;
    let series = exponent.compose(|n| {
        if n > 0 {
            factorial *= n as f64;
        }
        1.0 / factorial
    });
    let mut tail = 0.0;
    for &(nu, a) in &series.terms {
        if nu == 0.0 || (nu - nu.round()).abs() < 1e-12 {
            continue;
        }
        tail -= a * horizon.powf(-nu) * statrs::function::gamma::gamma(1.0 - nu).recip();
    }
    tail
}

/// `true` when the problem is the classical wave equation, for which every
/// kernel is a pure front.
pub fn is_pure_front(p: &MultiTermProblem) -> bool {
    p.wave_class() == WaveClass::ClassicalWave
}
