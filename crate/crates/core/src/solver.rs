//! Subordinated solvers on the whole line and on the unit interval.
//!
//! With `u(·,0) = v`, `u_t(·,0) = 0` and `A = ∂²_x`, the solution is
//! `u(t) = ∫ φ(t,τ) C(τ) v dτ` where `C` is the cosine family of `A`:
//!
//! - on the line `C(τ)v(x) = (v(x+τ) + v(x−τ))/2` (d'Alembert);
//! - on `(0,1)` with Dirichlet conditions `C(τ)φ_n = cos(nπτ) φ_n`, so
//!   `u = Σ v_n u_n(t) φ_n` with `u_n(t) = ∫ φ(t,τ) cos(nπτ) dτ`.
//!
//! `φ(t,·)` is tabulated once per `t` as a [`PhiProfile`] (adaptive piecewise
//! Chebyshev interpolant plus its point mass) and reused for every mode and
//! every `x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{phi_atom, phi_support, pdf_phi, Atom, KernelError};
use crate::problem::{MultiTermProblem, ProblemError, WaveClass};
use crate::quadrature::{
    integrate_adaptive, inverse_laplace_oracle, CompensatedSum, LaplaceConfig, LaplaceInversion, QuadratureConfig,
    QuadratureError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{what} did not converge (estimate {estimate:e})")]
    NoConvergence { what: String, estimate: f64 },
    #[error("discretisation error estimate {estimate:e} exceeds the limit {limit:e}; refine the time grid")]
    GridTooCoarse { estimate: f64, limit: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub quadrature: QuadratureConfig,
    /// Absolute accuracy of the `φ(t,·)` interpolant, relative to its peak
    /// scale `max(1, 1/τ_scale)`.
    pub profile_tol: f64,
    /// Default number of modes on the interval.
    pub modes: usize,
    /// Use the kernel path even where a closed form exists
    /// (classical wave and telegraph equations).
    pub force_kernel_path: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            quadrature: QuadratureConfig::default(),
            profile_tol: 1e-9,
            modes: 64,
            force_kernel_path: false,
        }
    }
}

impl SolverConfig {
    fn integral_tol(&self) -> f64 {
        (1e-3 * self.quadrature.abs_tol).max(1e-14)
    }
}

/// Initial data `v`.
pub trait InitialData: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Points where `v` or its derivatives jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// An interval outside which `v` vanishes (or is negligible).
    fn support(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F: Fn(f64) -> f64 + Sync> InitialData for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Built-in initial profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    /// `1` on `[a, b]`, `0` elsewhere.
    Indicator { a: f64, b: f64 },
    /// `exp(−(x − center)²/(2 width²))`.
    Gaussian { center: f64, width: f64 },
    /// `√2 sin(nπx)` on `[0, 1]`, `0` elsewhere.
    SineMode { n: usize },
}

impl InitialProfile {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = match *self {
            InitialProfile::Indicator { a, b } => a.is_finite() && b.is_finite() && a < b,
            InitialProfile::Gaussian { center, width } => center.is_finite() && width.is_finite() && width > 0.0,
            InitialProfile::SineMode { n } => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(SolverError::InvalidArgument(format!("bad initial profile {self:?}")))
        }
    }
}

impl InitialData for InitialProfile {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            InitialProfile::Indicator { a, b } => {
                if (a..=b).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            InitialProfile::Gaussian { center, width } => (-0.5 * ((x - center) / width).powi(2)).exp(),
            InitialProfile::SineMode { n } => {
                if (0.0..=1.0).contains(&x) {
                    std::f64::consts::SQRT_2 * (n as f64 * PI * x).sin()
                } else {
                    0.0
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            InitialProfile::Indicator { a, b } => vec![a, b],
            InitialProfile::Gaussian { center, .. } => vec![center],
            InitialProfile::SineMode { .. } => vec![0.0, 1.0],
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        match *self {
            InitialProfile::Indicator { a, b } => Some((a, b)),
            // e^{−x²/2} < 1e−300 beyond 37 widths
            InitialProfile::Gaussian { center, width } => Some((center - 37.0 * width, center + 37.0 * width)),
            InitialProfile::SineMode { .. } => Some((0.0, 1.0)),
        }
    }
}

/// `(v(x+t) + v(x−t))/2`.
pub fn dalembert<V: InitialData + ?Sized>(v: &V, x: f64, t: f64) -> f64 {
    0.5 * (v.eval(x + t) + v.eval(x - t))
}

const CHEB_NODES: usize = 16;

/// Chebyshev interpolant of `φ(t,·)` on one piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebPiece {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl ChebPiece {
    fn fit(a: f64, b: f64, values: &[f64]) -> Self {
        let n = values.len();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (j as f64 * PI * (i as f64 + 0.5) / n as f64).cos())
                    .sum();
                if j == 0 {
                    s / n as f64
                } else {
                    2.0 * s / n as f64
                }
            })
            .collect();
        ChebPiece { a, b, coeffs }
    }

    fn nodes(a: f64, b: f64) -> Vec<f64> {
        (0..CHEB_NODES)
            .map(|i| {
                let x = (PI * (i as f64 + 0.5) / CHEB_NODES as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * x
            })
            .collect()
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, tau: f64) -> f64 {
        let x = (2.0 * tau - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }

    pub fn integral(&self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .step_by(2)
            .map(|(j, c)| 2.0 * c / (1.0 - (j * j) as f64))
            .sum();
        0.5 * (self.b - self.a) * s
    }

    fn tail(&self) -> f64 {
        self.coeffs[CHEB_NODES - 3..].iter().map(|c| c.abs()).sum()
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

/// `φ(t,·)` as a piecewise Chebyshev interpolant of its regular part plus
/// the point mass on the front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub t: f64,
    pub pieces: Vec<ChebPiece>,
    pub atom: Option<Atom>,
    /// `φ(t,τ)` is treated as zero beyond this point.
    pub end: f64,
    pub evaluations: usize,
    /// False when some piece hit the refinement limit.
    pub resolved: bool,
}

impl PhiProfile {
    pub fn build(p: &MultiTermProblem, t: f64, config: &SolverConfig) -> Result<Self, SolverError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SolverError::InvalidArgument(format!("t = {t} must be positive")));
        }
        let atom = phi_atom(p, t);
        let mut profile = PhiProfile {
            t,
            pieces: Vec::new(),
            atom,
            end: 0.0,
            evaluations: 0,
            resolved: true,
        };
        if p.wave_class() == WaveClass::ClassicalWave {
            profile.end = atom.map_or(0.0, |a| a.location);
            return Ok(profile);
        }
        let scale = t.powf(p.alpha() / 2.0) / p.c().sqrt();
        let tol = config.profile_tol * scale.recip().max(1.0);
        let qcfg = &config.quadrature;
        let eval = |tau: f64| pdf_phi(p, t, tau, qcfg).map(|v| (v.value, v.error_estimate));
        match phi_support(p, t) {
            Some(b) => {
                profile.refine(&eval, 0.0, b, tol)?;
                profile.end = b;
            }
            None => {
                let (mut a, mut b) = (0.0, scale);
                let mut quiet = 0;
                for _ in 0..60 {
                    let before = profile.pieces.len();
                    profile.refine(&eval, a, b, tol)?;
                    let peak = profile.pieces[before..]
                        .iter()
                        .map(ChebPiece::max_abs)
                        .fold(0.0, f64::max);
                    profile.end = b;
                    if peak <= tol {
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
            }
        }
        Ok(profile)
    }

    fn refine<F>(&mut self, eval: &F, a: f64, b: f64, tol: f64) -> Result<(), SolverError>
    where
        F: Fn(f64) -> Result<(f64, f64), KernelError>,
    {
        let mut stack = vec![(a, b, 0usize)];
        let mut accepted = Vec::new();
        while let Some((a, b, depth)) = stack.pop() {
            let samples = ChebPiece::nodes(a, b)
                .into_iter()
                .map(eval)
                .collect::<Result<Vec<_>, _>>()?;
            self.evaluations += samples.len();
            let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
            // coefficients cannot resolve below the pointwise quadrature error
            let noise = samples
                .iter()
                .map(|s| 10.0 * s.1 + 1e-8 * s.0.abs())
                .fold(0.0, f64::max);
            let piece = ChebPiece::fit(a, b, &values);
            let target = tol + noise;
            if piece.tail() <= target || depth >= 30 {
                if piece.tail() > 100.0 * target {
                    self.resolved = false;
                }
                accepted.push(piece);
            } else {
                let mid = 0.5 * (a + b);
                stack.push((mid, b, depth + 1));
                stack.push((a, mid, depth + 1));
            }
        }
        self.pieces.extend(accepted);
        Ok(())
    }

    /// Regular part of `φ(t,τ)`.
    pub fn eval(&self, tau: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.b < tau);
        match self.pieces.get(i) {
            Some(p) if p.a <= tau => p.eval(tau),
            _ => 0.0,
        }
    }

    /// `∫ φ(t,τ) dτ` including the point mass.
    pub fn mass(&self) -> f64 {
        let regular: CompensatedSum = self.pieces.iter().map(ChebPiece::integral).collect();
        regular.value() + self.atom.map_or(0.0, |a| a.weight)
    }

    /// `∫ φ(t,τ) f(τ) dτ` including the point mass; `breakpoints` are points
    /// where `f` is not smooth.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, breakpoints: &[f64], tol: f64) -> f64 {
        let mut total = CompensatedSum::new();
        let mut cuts: Vec<f64> = breakpoints.to_vec();
        cuts.sort_by(f64::total_cmp);
        for piece in &self.pieces {
            let mut a = piece.a;
            for &c in cuts.iter().filter(|&&c| c > piece.a && c < piece.b) {
                total.add(integrate_adaptive(|x| piece.eval(x) * f(x), a, c, tol, 0.0, 200).value);
                a = c;
            }
            total.add(integrate_adaptive(|x| piece.eval(x) * f(x), a, piece.b, tol, 0.0, 200).value);
        }
        if let Some(atom) = self.atom {
            total.add(atom.weight * f(atom.location));
        }
        total.value()
    }

    /// `∫ φ(t,τ) cos(kτ) dτ`.
    pub fn cosine_moment(&self, k: f64, tol: f64) -> f64 {
        self.integrate(|tau| (k * tau).cos(), &[], tol)
    }
}

/// Closed-form eigenmode of `c u'' + c₁ u' + λ u = 0`, `u(0) = 1`, `u'(0) = 0`
/// (classical wave when `c₁ = 0`).
pub fn damped_cosine(c: f64, c1: f64, lambda: f64, t: f64) -> f64 {
    let a = c1 / (2.0 * c);
    let disc = c1 * c1 - 4.0 * c * lambda;
    if disc < 0.0 {
        let omega = (-disc).sqrt() / (2.0 * c);
        (-a * t).exp() * ((omega * t).cos() + a / omega * (omega * t).sin())
    } else if disc > 0.0 {
        let root = disc.sqrt() / (2.0 * c);
        let (r1, r2) = (-a + root, -a - root);
        (r2 * (r1 * t).exp() - r1 * (r2 * t).exp()) / (r2 - r1)
    } else {
        (-a * t).exp() * (1.0 + a * t)
    }
}

fn closed_form_mode(p: &MultiTermProblem, config: &SolverConfig) -> Option<(f64, f64)> {
    if config.force_kernel_path {
        return None;
    }
    match p.wave_class() {
        WaveClass::ClassicalWave => Some((p.c(), 0.0)),
        WaveClass::Telegraph => Some((p.c(), p.terms()[0].coeff)),
        _ => None,
    }
}

/// Laplace transform `g(s)/(s(g(s) + λ))` of the eigenmode `u_λ`.
pub fn eigenmode_transform(p: &MultiTermProblem, lambda: f64, s: Complex64) -> Result<Complex64, ProblemError> {
    let g = p.g_eval(s)?;
    Ok(g / (s * (g + lambda)))
}

/// Complex poles `s_p` (upper half plane) of the eigenmode transform and
/// their residues `g(s_p)/(s_p g'(s_p))`, from Newton's method on
/// `g(s) + λ = 0` on the principal sheet.
pub fn eigenmode_poles(p: &MultiTermProblem, lambda: f64) -> Vec<(Complex64, Complex64)> {
    let mut guesses = Vec::new();
    let mut orders = vec![(p.alpha(), p.c())];
    orders.extend(p.terms().iter().map(|t| (t.order, t.coeff)));
    for &(order, coeff) in &orders {
        let radius = (lambda / coeff).powf(1.0 / order);
        let angle = (PI / order).min(0.95 * PI);
        guesses.push(Complex64::from_polar(radius, angle));
        for scale in [0.5, 1.0, 2.0] {
            for frac in [0.3, 0.5, 0.7, 0.9] {
                guesses.push(Complex64::from_polar(scale * radius, frac * PI));
            }
        }
    }
    let mut poles: Vec<(Complex64, Complex64)> = Vec::new();
    for mut s in guesses {
        let mut found = false;
        for _ in 0..100 {
            let (Ok(g), Ok(dg)) = (p.g_eval(s), p.g_derivative(s)) else {
                break;
            };
            let step = (g + lambda) / dg;
            s -= step;
            if !(s.im > 0.0) {
                break;
            }
            if step.norm() <= 1e-15 * s.norm() {
                found = true;
                break;
            }
        }
        if !found || poles.iter().any(|(q, _)| (q - s).norm() <= 1e-9 * s.norm()) {
            continue;
        }
        let (Ok(g), Ok(dg)) = (p.g_eval(s), p.g_derivative(s)) else {
            continue;
        };
        if (g + lambda).norm() <= 1e-10 * lambda {
            poles.push((s, g / (s * dg)));
        }
    }
    poles.sort_by(|a, b| a.0.im.total_cmp(&b.0.im));
    poles
}

/// `u_λ(t)` by numerical inversion of its Laplace transform, independent of
/// the kernels. The complex poles are subtracted before inversion and their
/// exponentials added back, since the deformed contour may pass too close
/// to them (or leave them outside) when they lie near the imaginary axis.
pub fn eigenmode_oracle(
    p: &MultiTermProblem,
    lambda: f64,
    t: f64,
    laplace: &LaplaceConfig,
) -> Result<LaplaceInversion, QuadratureError> {
    let poles = eigenmode_poles(p, lambda);
    let smooth = |s: Complex64| -> Result<Complex64, ProblemError> {
        let mut f = eigenmode_transform(p, lambda, s)?;
        for (sp, r) in &poles {
            f -= r / (s - sp) + r.conj() / (s - sp.conj());
        }
        Ok(f)
    };
    let mut inv = inverse_laplace_oracle(smooth, t, laplace)?;
    for (sp, r) in &poles {
        inv.value += 2.0 * (r * (sp * t).exp()).re;
    }
    Ok(inv)
}

/// One eigenmode `u_λ(t) = ∫ φ(t,τ) cos(√λ τ) dτ` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenmode {
    pub lambda: f64,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub closed_form: bool,
}

fn check_grid(name: &str, grid: &[f64], nonnegative: bool) -> Result<(), SolverError> {
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite() || (nonnegative && *v < 0.0)) {
        return Err(SolverError::InvalidArgument(format!(
            "{name} grid must be non-empty and finite{}",
            if nonnegative { " with non-negative entries" } else { "" }
        )));
    }
    Ok(())
}

/// `u_λ(t)` for several `λ` at once; profiles of `φ(t,·)` are built once per
/// `t` and shared by all modes. Returns `values[mode][time]`.
pub fn eigenmodes(
    p: &MultiTermProblem,
    lambdas: &[f64],
    t_grid: &[f64],
    config: &SolverConfig,
) -> Result<Vec<Eigenmode>, SolverError> {
    check_grid("t", t_grid, true)?;
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(SolverError::InvalidArgument(format!("λ = {l} must be positive")));
    }
    if let Some((c, c1)) = closed_form_mode(p, config) {
        return Ok(lambdas
            .iter()
            .map(|&lambda| Eigenmode {
                lambda,
                t_grid: t_grid.to_vec(),
                values: t_grid.iter().map(|&t| damped_cosine(c, c1, lambda, t)).collect(),
                closed_form: true,
            })
            .collect());
    }
    let tol = config.integral_tol();
    let columns: Vec<Vec<f64>> = t_grid
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                return Ok(vec![1.0; lambdas.len()]);
            }
            let profile = PhiProfile::build(p, t, config)?;
            Ok(lambdas.iter().map(|l| profile.cosine_moment(l.sqrt(), tol)).collect())
        })
        .collect::<Result<_, SolverError>>()?;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(n, &lambda)| Eigenmode {
            lambda,
            t_grid: t_grid.to_vec(),
            values: columns.iter().map(|c| c[n]).collect(),
            closed_form: false,
        })
        .collect())
}

pub fn eigenmode(
    p: &MultiTermProblem,
    lambda: f64,
    t_grid: &[f64],
    config: &SolverConfig,
) -> Result<Eigenmode, SolverError> {
    Ok(eigenmodes(p, &[lambda], t_grid, config)?.remove(0))
}

/// Dirichlet eigenvalue `λ_n = n²π²` of `−∂²` on `(0,1)`.
pub fn dirichlet_eigenvalue(n: usize) -> f64 {
    let k = n as f64 * PI;
    k * k
}

/// Truncated eigenfunction expansion of the solution on `(0,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenExpansion {
    pub n_modes: usize,
    pub lambdas: Vec<f64>,
    /// `v_n = (v, √2 sin(nπ·))`.
    pub v_coeffs: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// `modes[n−1][k] = u_n(t_k)`.
    pub modes: Vec<Vec<f64>>,
    /// `Σ_{n>N} v_n² = ‖v‖² − Σ_{n≤N} v_n²`.
    pub tail_estimate: f64,
}

/// A solution tabulated on `t_grid × x_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub problem: MultiTermProblem,
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// `values[k][i] = u(x_i, t_k)`.
    pub values: Vec<Vec<f64>>,
    pub n_modes: Option<usize>,
    pub tail_estimate: Option<f64>,
}

impl SolutionField {
    /// CSV with `#` provenance lines and columns `t,x,u`.
    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            out.push_str(&format!("# {line}\n"));
        }
        if let Some(n) = self.n_modes {
            out.push_str(&format!("# modes: {n}\n"));
        }
        if let Some(tail) = self.tail_estimate {
            out.push_str(&format!("# truncation tail: {tail:.16e}\n"));
        }
        out.push_str("t,x,u\n");
        for (k, t) in self.t_grid.iter().enumerate() {
            for (i, x) in self.x_grid.iter().enumerate() {
                out.push_str(&format!("{t:.16e},{x:.16e},{:.16e}\n", self.values[k][i]));
            }
        }
        out
    }
}

impl EigenExpansion {
    /// CSV with columns `t,u_1,…,u_N`.
    pub fn modes_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            out.push_str(&format!("# {line}\n"));
        }
        out.push_str("t");
        for n in 1..=self.n_modes {
            out.push_str(&format!(",u_{n}"));
        }
        out.push('\n');
        for (k, t) in self.t_grid.iter().enumerate() {
            out.push_str(&format!("{t:.16e}"));
            for m in &self.modes {
                out.push_str(&format!(",{:.16e}", m[k]));
            }
            out.push('\n');
        }
        out
    }
}

/// Initial data and grids for the whole-line problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineProblem {
    pub initial: InitialProfile,
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
}

impl LineProblem {
    /// Checks the grids and that the initial data are absolutely integrable.
    pub fn validate(&self) -> Result<f64, SolverError> {
        self.initial.validate()?;
        check_grid("x", &self.x_grid, false)?;
        check_grid("t", &self.t_grid, true)?;
        let (a, b) = self.initial.support().expect("built-in profiles have bounded support");
        let mass = integrate_over(&self.initial, a, b, |x| self.initial.eval(x).abs(), 1e-12);
        if !mass.is_finite() {
            return Err(SolverError::InvalidArgument("initial data are not integrable".into()));
        }
        Ok(mass)
    }
}

fn integrate_over<V: InitialData + ?Sized, F: Fn(f64) -> f64>(v: &V, a: f64, b: f64, f: F, tol: f64) -> f64 {
    let mut cuts: Vec<f64> = v.breakpoints().into_iter().filter(|&c| c > a && c < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.insert(0, a);
    cuts.push(b);
    let total: CompensatedSum = cuts
        .windows(2)
        .map(|w| integrate_adaptive(&f, w[0], w[1], tol, 0.0, 500).value)
        .collect();
    total.value()
}

/// `u(x,t) = ∫ φ(t,τ) (v(x+τ) + v(x−τ))/2 dτ` for one `t` on a grid of `x`.
pub fn line_profile_values<V: InitialData + ?Sized>(
    profile: &PhiProfile,
    v: &V,
    x_grid: &[f64],
    tol: f64,
) -> Vec<f64> {
    let bps = v.breakpoints();
    x_grid
        .iter()
        .map(|&x| {
            let cuts: Vec<f64> = bps.iter().flat_map(|&b| [b - x, x - b]).filter(|&c| c > 0.0).collect();
            profile.integrate(|tau| dalembert(v, x, tau), &cuts, tol)
        })
        .collect()
}

/// Whole-line solution on `lp.t_grid × lp.x_grid`.
pub fn solve_line(
    p: &MultiTermProblem,
    lp: &LineProblem,
    config: &SolverConfig,
) -> Result<SolutionField, SolverError> {
    lp.validate()?;
    let v = &lp.initial;
    let tol = config.integral_tol();
    let classical = p.wave_class() == WaveClass::ClassicalWave && !config.force_kernel_path;
    let values = lp
        .t_grid
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                return Ok(lp.x_grid.iter().map(|&x| v.eval(x)).collect());
            }
            if classical {
                let delay = t / p.c().sqrt();
                return Ok(lp.x_grid.iter().map(|&x| dalembert(v, x, delay)).collect());
            }
            let profile = PhiProfile::build(p, t, config)?;
            Ok(line_profile_values(&profile, v, &lp.x_grid, tol))
        })
        .collect::<Result<_, SolverError>>()?;
    Ok(SolutionField {
        problem: p.clone(),
        x_grid: lp.x_grid.clone(),
        t_grid: lp.t_grid.clone(),
        values,
        n_modes: None,
        tail_estimate: None,
    })
}

/// `v_n = ∫₀¹ v(x) √2 sin(nπx) dx` for `n = 1..N` and `‖v‖²`.
pub fn sine_coefficients<V: InitialData + ?Sized>(v: &V, n_modes: usize, tol: f64) -> (Vec<f64>, f64) {
    let coeffs = (1..=n_modes)
        .map(|n| {
            let k = n as f64 * PI;
            integrate_over(v, 0.0, 1.0, |x| v.eval(x) * std::f64::consts::SQRT_2 * (k * x).sin(), tol)
        })
        .collect();
    let norm = integrate_over(v, 0.0, 1.0, |x| v.eval(x).powi(2), tol);
    (coeffs, norm)
}

/// Dirichlet problem on `(0,1)` by the truncated expansion `Σ v_n u_n(t) φ_n`.
pub fn solve_interval<V: InitialData + ?Sized>(
    p: &MultiTermProblem,
    v: &V,
    n_modes: usize,
    x_grid: &[f64],
    t_grid: &[f64],
    config: &SolverConfig,
) -> Result<(SolutionField, EigenExpansion), SolverError> {
    if n_modes == 0 {
        return Err(SolverError::InvalidArgument("need at least one mode".into()));
    }
    check_grid("x", x_grid, false)?;
    check_grid("t", t_grid, true)?;
    let (v_coeffs, norm) = sine_coefficients(v, n_modes, config.integral_tol());
    let lambdas: Vec<f64> = (1..=n_modes).map(dirichlet_eigenvalue).collect();
    let modes: Vec<Vec<f64>> = eigenmodes(p, &lambdas, t_grid, config)?
        .into_iter()
        .map(|m| m.values)
        .collect();
    let tail_estimate = (norm - v_coeffs.iter().map(|c| c * c).sum::<f64>()).max(0.0);
    let values = (0..t_grid.len())
        .map(|k| {
            x_grid
                .iter()
                .map(|&x| {
                    let sum: CompensatedSum = (0..n_modes)
                        .map(|n| {
                            v_coeffs[n] * modes[n][k] * std::f64::consts::SQRT_2 * ((n + 1) as f64 * PI * x).sin()
                        })
                        .collect();
                    sum.value()
                })
                .collect()
        })
        .collect();
    Ok((
        SolutionField {
            problem: p.clone(),
            x_grid: x_grid.to_vec(),
            t_grid: t_grid.to_vec(),
            values,
            n_modes: Some(n_modes),
            tail_estimate: Some(tail_estimate),
        },
        EigenExpansion {
            n_modes,
            lambdas,
            v_coeffs,
            t_grid: t_grid.to_vec(),
            modes,
            tail_estimate,
        },
    ))
}

/// Caputo derivatives of a function tabulated on the uniform grid `t_k = k·dt`
/// with `u'(0) = 0`.
///
/// Orders in `(0,1)` use the L1 scheme on `u`; orders in `(1,2)` use L1 on
/// `u'`, itself from central differences (`D^β u = D^{β−1} u'` when
/// `u'(0) = 0`); integer orders use central differences. The L1 error is
/// `O(dt^{2−γ})` for a smooth integrand of fractional order `γ`.
pub fn caputo_derivative(u: &[f64], dt: f64, order: f64) -> Vec<f64> {
    let n = u.len();
    let mut out = vec![f64::NAN; n];
    if n < 3 {
        return out;
    }
    let velocity: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => 0.0,
            k if k == n - 1 => f64::NAN,
            k => (u[k + 1] - u[k - 1]) / (2.0 * dt),
        })
        .collect();
    let l1 = |f: &[f64], gamma: f64, out: &mut Vec<f64>, last: usize| {
        let weight = dt.powf(-gamma) / statrs::function::gamma::gamma(2.0 - gamma);
        let b: Vec<f64> = (0..=last)
            .map(|j| ((j + 1) as f64).powf(1.0 - gamma) - (j as f64).powf(1.0 - gamma))
            .collect();
        for k in 1..=last {
            let s: f64 = (0..k).map(|j| b[j] * (f[k - j] - f[k - j - 1])).sum();
            out[k] = weight * s;
        }
        out[0] = 0.0;
    };
    if order == 2.0 {
        for k in 1..n - 1 {
            out[k] = (u[k + 1] - 2.0 * u[k] + u[k - 1]) / (dt * dt);
        }
    } else if order == 1.0 {
        out[..n - 1].copy_from_slice(&velocity[..n - 1]);
    } else if order > 1.0 {
        l1(&velocity, order - 1.0, &mut out, n - 2);
    } else {
        l1(u, order, &mut out, n - 1);
    }
    out
}

/// Residual of the eigen-equation `c D^α u + Σ c_j D^{α_j} u + λu = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub lambda: f64,
    pub dt: f64,
    /// Residual at interior grid points (`NaN` where undefined).
    pub residual: Vec<f64>,
    pub max_residual: f64,
    /// `max |R_dt − R_{2dt}|` over shared points, an estimate of the
    /// discretisation error.
    pub error_estimate: f64,
}

fn residual_on(p: &MultiTermProblem, u: &[f64], dt: f64, lambda: f64) -> Vec<f64> {
    let mut r: Vec<f64> = u.iter().map(|x| lambda * x).collect();
    let mut add = |order: f64, coeff: f64| {
        for (ri, d) in r.iter_mut().zip(caputo_derivative(u, dt, order)) {
            *ri += coeff * d;
        }
    };
    add(p.alpha(), p.c());
    for t in p.terms() {
        add(t.order, t.coeff);
    }
    let n = r.len();
    r[0] = f64::NAN;
    if n > 1 {
        r[n - 1] = f64::NAN;
    }
    r
}

/// Max-norm residual over `t ≥ from` of the eigen-equation for `u`
/// tabulated at `t_k = k·dt`. Fails with `GridTooCoarse` when the
/// discretisation error estimate exceeds `limit`.
///
/// Eigenmodes of fractional problems behave like `1 − C t^α` near `t = 0`,
/// where no uniform-grid scheme is accurate: the first few residuals stay
/// `O(1)` however small `dt` is. `from` excludes that initial layer.
pub fn caputo_residual(
    p: &MultiTermProblem,
    u: &[f64],
    dt: f64,
    lambda: f64,
    from: f64,
    limit: f64,
) -> Result<ResidualReport, SolverError> {
    if u.len() < 7 || !(dt > 0.0) {
        return Err(SolverError::InvalidArgument(
            "need at least 7 samples and a positive step".into(),
        ));
    }
    let fine = residual_on(p, u, dt, lambda);
    let coarse_u: Vec<f64> = u.iter().step_by(2).copied().collect();
    let coarse = residual_on(p, &coarse_u, 2.0 * dt, lambda);
    let first = (from / dt).ceil().max(0.0) as usize;
    let error_estimate = coarse
        .iter()
        .enumerate()
        .filter(|(k, _)| 2 * k >= first)
        .filter_map(|(k, rc)| {
            let d = (fine.get(2 * k)? - rc).abs();
            d.is_finite().then_some(d)
        })
        .fold(0.0, f64::max);
    let max_residual = fine
        .iter()
        .skip(first)
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if error_estimate > limit {
        return Err(SolverError::GridTooCoarse {
            estimate: error_estimate,
            limit,
        });
    }
    Ok(ResidualReport {
        lambda,
        dt,
        residual: fine,
        max_residual,
        error_estimate,
    })
}
