//! The invariant suite behind `fracsub verify`.
//!
//! Each check is named, belongs to one library module and reports the
//! measured quantity next to its tolerance. `--suite` selects a module, a
//! single check or `all`. A check whose computation fails counts as failed.

use std::f64::consts::PI;
use std::sync::OnceLock;

use fracsub_core::bernstein::{check_bernstein_sqrt_g, check_concavity_scan, GridSpec, DEFAULT_TOLERANCE, MAX_ORDER};
use fracsub_core::kernels::{
    density_mass, evaluate, laplace_cross_check, pdf_phi, pdf_psi, propagation_w, propagation_w_log,
    propagation_w_uncut, psi_support, signaling_mass,
};
use fracsub_core::num_complex::Complex64;
use fracsub_core::problem::{validate, validate_with, ProblemSpec};
use fracsub_core::quadrature::{integrate_adaptive, integrate_oscillatory, LaplaceConfig};
use fracsub_core::solver::{
    damped_cosine, dirichlet_eigenvalue, eigenmodes, line_profile_values, sine_coefficients, Eigenmode,
    InitialProfile, PhiProfile, SolverConfig,
};
use fracsub_core::wright::{mainardi, single_term_kernel};
use fracsub_core::{KernelKind, MultiTermProblem, QuadratureConfig, Term};
use statrs::function::gamma::gamma;

use crate::output::{Cell, CommandName, Document};
use crate::{CliError, Outcome, Settings};

/// Spatial samples (`x` or `τ`) of the standard grid.
pub const STANDARD_SPACE: [f64; 5] = [0.15, 0.35, 0.7, 1.3, 2.6];
/// Time samples of the standard grid (no `x = t` coincidences with the above).
pub const STANDARD_TIMES: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Finding {
    /// Passes when `measured ≤ tolerance`.
    fn at_most(measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Finding {
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }
}

pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub run: fn(&Context) -> Result<Finding, CliError>,
}

/// Shared inputs of the checks.
pub struct Context {
    pub quadrature: QuadratureConfig,
    pub solver: SolverConfig,
    /// Validated problems the generic checks sweep over.
    pub problems: Vec<(String, MultiTermProblem)>,
    fig6_modes: OnceLock<Result<Vec<Eigenmode>, String>>,
}

impl Context {
    pub fn new(quadrature: QuadratureConfig, solver: SolverConfig, extra: Option<MultiTermProblem>) -> Self {
        let mut problems = default_problems();
        if let Some(p) = extra {
            if !p.spread_overridden() {
                problems.push(("user problem".into(), p));
            }
        }
        Context {
            quadrature,
            solver,
            problems,
            fig6_modes: OnceLock::new(),
        }
    }

    /// `u_n(t)`, `n = 1..4`, for `(α, α_1) = (1.8, 1.5)` on `t ∈ [0, 20]`.
    fn long_modes(&self) -> Result<&[Eigenmode], CliError> {
        let modes = self.fig6_modes.get_or_init(|| {
            let p = MultiTermProblem::two_term(1.8, 1.5).map_err(|e| e.to_string())?;
            let ts: Vec<f64> = (0..=80).map(|k| 0.25 * k as f64).collect();
            let lambdas: Vec<f64> = (1..=4).map(dirichlet_eigenvalue).collect();
            eigenmodes(&p, &lambdas, &ts, &self.solver).map_err(|e| e.to_string())
        });
        modes.as_deref().map_err(|e| CliError::Convergence(e.clone()))
    }
}

pub fn default_problems() -> Vec<(String, MultiTermProblem)> {
    let two = |a: f64, b: f64| MultiTermProblem::two_term(a, b).expect("valid");
    vec![
        ("classical wave".into(), MultiTermProblem::classical_wave()),
        ("telegraph".into(), MultiTermProblem::telegraph()),
        ("alpha=2, alpha_1=1.5".into(), two(2.0, 1.5)),
        ("alpha=1.9, alpha_1=1.5".into(), two(1.9, 1.5)),
        ("alpha=1.8, alpha_1=1.5".into(), two(1.8, 1.5)),
        ("alpha=1.5, alpha_1=1".into(), two(1.5, 1.0)),
        ("single-term alpha=1.5".into(), MultiTermProblem::new(1.5, 1.0, &[]).expect("valid")),
        (
            "alpha=1.9, (1.5, 0.5), (1.1, 2)".into(),
            MultiTermProblem::new(1.9, 1.0, &[(1.5, 0.5), (1.1, 2.0)]).expect("valid"),
        ),
    ]
}

pub fn checks() -> Vec<Check> {
    macro_rules! check {
        ($module:literal, $name:literal, $f:expr) => {
            Check {
                module: $module,
                name: $name,
                run: $f,
            }
        };
    }
    vec![
        check!("problem", "symbol-square", symbol_square),
        check!("problem", "k-positivity", k_positivity),
        check!("problem", "k-slopes", k_slopes),
        check!("problem", "ab-consistency", ab_consistency),
        check!("problem", "root-symbol-half", root_symbol_half),
        check!("problem", "validation", validation_rules),
        check!("bernstein", "bernstein-sqrt-g", bernstein_sqrt_g),
        check!("bernstein", "concavity-counterexample", concavity_counterexample),
        check!("quadrature", "sine-integral", sine_integral),
        check!("quadrature", "refinement", refinement),
        check!("quadrature", "truncation-point", truncation_point),
        check!("wright", "wright-nonnegative", wright_nonnegative),
        check!("wright", "wright-normalization", wright_normalization),
        check!("wright", "wright-half", wright_half),
        check!("wright", "wright-moment", wright_moment),
        check!("kernels", "positivity", positivity),
        check!("kernels", "monotonicity", monotonicity),
        check!("kernels", "normalization", normalization),
        check!("kernels", "finite-speed", finite_speed),
        check!("kernels", "infinite-speed", infinite_speed),
        check!("kernels", "wright-equivalence", wright_equivalence),
        check!("kernels", "composition", composition),
        check!("kernels", "laplace", laplace),
        check!("solver", "eigenmode-bound", eigenmode_bound),
        check!("solver", "envelope-decay", envelope_decay),
        check!("solver", "parseval", parseval),
        check!("solver", "line-mass", line_mass),
        check!("solver", "telegraph-eigenmode", telegraph_eigenmode),
    ]
}

/// Runs the selected checks into a table with one row per check.
pub fn run(settings: &Settings, suite: &str) -> Result<Outcome, CliError> {
    let selected: Vec<Check> = checks()
        .into_iter()
        .filter(|c| suite == "all" || c.module == suite || c.name == suite)
        .collect();
    if selected.is_empty() {
        let names: Vec<&str> = checks().iter().map(|c| c.name).collect();
        return Err(CliError::Validation(format!(
            "unknown suite '{suite}' (use all, a module name or one of: {})",
            names.join(", ")
        )));
    }
    let extra = match &settings.problem {
        Some(_) => Some(settings.problem()?),
        None => None,
    };
    let ctx = Context::new(settings.quadrature, settings.solver_config(64), extra);
    let mut m = settings.manifest(CommandName::Verify);
    m.parameters.insert("suite".into(), suite.into());
    let columns = ["module", "check", "passed", "measured", "tolerance", "detail"];
    let mut doc = Document::new(m, columns.iter().map(|s| s.to_string()).collect());
    let mut failed = 0;
    for c in &selected {
        let finding = (c.run)(&ctx).unwrap_or_else(|e| Finding {
            passed: false,
            measured: f64::NAN,
            tolerance: f64::NAN,
            detail: format!("error: {e}"),
        });
        eprintln!(
            "{} {}/{}: {}",
            if finding.passed { "PASS" } else { "FAIL" },
            c.module,
            c.name,
            finding.detail
        );
        failed += usize::from(!finding.passed);
        doc.push(vec![
            c.module.into(),
            c.name.into(),
            Cell::Flag(finding.passed),
            finding.measured.into(),
            finding.tolerance.into(),
            finding.detail.into(),
        ]);
    }
    Ok(Outcome {
        document: doc,
        failed_checks: failed,
    })
}

fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    let (a, b) = (min.ln(), max.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Tracks the largest value seen and where.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            at: "none (all zero)".into(),
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }
}

// ---------------------------------------------------------------- problem

fn symbol_square(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for (label, p) in &ctx.problems {
        for r in log_grid(1e-8, 1e8, 65) {
            let k = p.k_eval(r);
            let g = Complex64::new(k.a, k.b);
            let err = (k.root() * k.root() - g).norm() / g.norm();
            worst.update(err, || format!("{label}, r = {r:e}"));
        }
    }
    Ok(Finding::at_most(
        worst.value,
        1e-12,
        format!("max relative |(K⁺+iK⁻)² − (A+iB)| at {}", worst.at),
    ))
}

fn k_positivity(ctx: &Context) -> Result<Finding, CliError> {
    let mut bad = Vec::new();
    for (label, p) in &ctx.problems {
        let pure_wave = p.m() == 0 && p.alpha() == 2.0;
        for r in log_grid(1e-8, 1e8, 65) {
            let k = p.k_eval(r);
            let ok = if pure_wave {
                k.k_plus == 0.0 && k.k_minus > 0.0
            } else {
                k.k_plus > 0.0 && k.k_minus > 0.0
            };
            if !ok {
                bad.push(format!("{label} at r = {r:e}"));
            }
        }
    }
    let detail = if bad.is_empty() {
        "K± > 0 (K⁺ ≡ 0 for the classical wave) on r ∈ [1e-8, 1e8]".to_string()
    } else {
        format!("violations: {}", bad.join("; "))
    };
    Ok(Finding::at_most(bad.len() as f64, 0.0, detail))
}

fn k_slopes(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for (label, p) in &ctx.problems {
        for (r1, r2, order) in [(1e-10, 1e-9, p.min_order()), (1e9, 1e10, p.alpha())] {
            let (k1, k2) = (p.k_eval(r1), p.k_eval(r2));
            let slope = |a: f64, b: f64| (b / a).ln() / (r2 / r1).ln();
            let mut parts = vec![
                ("|K|", slope(k1.root().norm(), k2.root().norm())),
                ("K⁻", slope(k1.k_minus, k2.k_minus)),
            ];
            // K⁺ vanishes to leading order when the limiting order is 2
            if order < 2.0 {
                parts.push(("K⁺", slope(k1.k_plus, k2.k_plus)));
            }
            for (name, s) in parts {
                worst.update((s - order / 2.0).abs(), || {
                    format!("{label}, {name} on [{r1:e}, {r2:e}]: slope {s:.5} vs {:.5}", order / 2.0)
                });
            }
        }
    }
    Ok(Finding::at_most(worst.value, 0.02, format!("worst log-log slope: {}", worst.at)))
}

fn ab_consistency(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for (label, p) in &ctx.problems {
        for r in log_grid(1e-8, 1e8, 65) {
            let (a, b) = p.ab_eval(r);
            let g = p.g_eval(Complex64::new(0.0, r))?;
            worst.update((Complex64::new(a, b) - g).norm() / g.norm(), || format!("{label}, r = {r:e}"));
        }
    }
    Ok(Finding::at_most(worst.value, 1e-12, format!("max relative |A+iB − g(ir)| at {}", worst.at)))
}

fn root_symbol_half(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for (label, p) in &ctx.problems {
        for r in log_grid(1e-8, 1e8, 65) {
            let (re, im) = p.root_symbol(r, 0.5)?;
            let k = p.k_eval(r);
            let err = (Complex64::new(re, im) - k.root()).norm() / k.root().norm();
            worst.update(err, || format!("{label}, r = {r:e}"));
        }
    }
    Ok(Finding::at_most(worst.value, 1e-14, format!("max relative difference at {}", worst.at)))
}

fn validation_rules(_: &Context) -> Result<Finding, CliError> {
    let spec = |alpha: f64, c: f64, terms: &[(f64, f64)]| ProblemSpec {
        alpha,
        c,
        terms: terms.iter().map(|&(o, k)| Term::new(o, k)).collect(),
    };
    let cases = [
        ("α = 2.1 rejected", validate(&spec(2.1, 1.0, &[])).is_err()),
        ("α = 1 rejected", validate(&spec(1.0, 1.0, &[])).is_err()),
        ("c = 0 rejected", validate(&spec(1.5, 0.0, &[])).is_err()),
        ("c_1 < 0 rejected", validate(&spec(1.9, 1.0, &[(1.5, -1.0)])).is_err()),
        ("α_1 ≥ α rejected", validate(&spec(1.5, 1.0, &[(1.6, 1.0)])).is_err()),
        ("spread 1.6 rejected", validate(&spec(1.9, 1.0, &[(0.3, 1.0)])).is_err()),
        ("spread 1.6 with override", validate_with(&spec(1.9, 1.0, &[(0.3, 1.0)]), true).is_ok()),
        ("telegraph accepted", validate(&spec(2.0, 1.0, &[(1.0, 1.0)])).is_ok()),
    ];
    let wrong: Vec<&str> = cases.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = if wrong.is_empty() {
        format!("{} accept/reject cases behave as expected", cases.len())
    } else {
        format!("wrong outcome: {}", wrong.join(", "))
    };
    Ok(Finding::at_most(wrong.len() as f64, 0.0, detail))
}

// -------------------------------------------------------------- bernstein

fn bernstein_sqrt_g(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    let mut failures = Vec::new();
    for (label, p) in &ctx.problems {
        let report = check_bernstein_sqrt_g(p, &GridSpec::default(), MAX_ORDER)?;
        worst.update(report.max_violation, || label.clone());
        if !report.verdict.passed {
            failures.push(format!("{label}: {}", report.statement()));
        }
    }
    let detail = if failures.is_empty() {
        format!(
            "√g consistent with a Bernstein function up to order {MAX_ORDER} on s ∈ [1e-4, 1e4]; largest violation at {}",
            worst.at
        )
    } else {
        failures.join("; ")
    };
    Ok(Finding {
        passed: failures.is_empty(),
        measured: worst.value,
        tolerance: DEFAULT_TOLERANCE,
        detail,
    })
}

fn concavity_counterexample(_: &Context) -> Result<Finding, CliError> {
    let spec = ProblemSpec {
        alpha: 1.9,
        c: 1.0,
        terms: vec![Term::new(0.3, 1.0)],
    };
    let p = validate_with(&spec, true)?;
    Ok(match check_concavity_scan(&p, &GridSpec::default())? {
        Some(w) => Finding {
            passed: true,
            measured: w.relative,
            tolerance: DEFAULT_TOLERANCE,
            detail: format!(
                "(α, α_1) = (1.9, 0.3): √g convex at s = {:.4e} (second derivative {:.3e} ± {:.1e})",
                w.s, w.second_difference, w.noise
            ),
        },
        None => Finding {
            passed: false,
            measured: 0.0,
            tolerance: DEFAULT_TOLERANCE,
            detail: "(α, α_1) = (1.9, 0.3): no convex point found".into(),
        },
    })
}

// ------------------------------------------------------------- quadrature

fn sinc(r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        r.sin() / r
    }
}

fn sine_integral(ctx: &Context) -> Result<Finding, CliError> {
    let res = integrate_oscillatory(sinc, |r| r, |_| 0.0, &ctx.quadrature)?;
    let err = (res.value - PI / 2.0).abs();
    // partial sums over whole half-periods alternate around π/2
    let mut sum = 0.0;
    let mut alternates = true;
    let mut previous_side = 0.0;
    for k in 0..40 {
        let a = k as f64 * PI;
        sum += integrate_adaptive(sinc, a, a + PI, 1e-15, 1e-15, 50).value;
        let side = (sum - PI / 2.0).signum();
        alternates &= side != previous_side;
        previous_side = side;
    }
    let tolerance = 1e-8_f64.max(ctx.quadrature.abs_tol);
    Ok(Finding {
        passed: err <= tolerance && res.panels_used <= 200 && alternates,
        measured: err,
        tolerance,
        detail: format!(
            "∫ sin r / r: error {err:.3e} with {} panels; partial sums {}",
            res.panels_used,
            if alternates { "alternate" } else { "do not alternate" }
        ),
    })
}

type Case = (fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64, f64, &'static str);

fn regression_cases() -> Vec<Case> {
    vec![
        (sinc, |r| r, |_| 0.0, PI / 2.0, "sin r / r"),
        (|r| (-r).exp() * r.powf(-0.3), |_| 0.0, |r| r, gamma(0.7), "r^-0.3 e^-r"),
        (|r| (-r).exp() * (3.0 * r).cos(), |r| 3.0 * r, |r| r, 0.1, "e^-r cos 3r"),
    ]
}

fn refinement(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for (f, phase, damping, exact, name) in regression_cases() {
        let mut previous = f64::INFINITY;
        for tol in [1e-6, 5e-7, 2.5e-7, 1.25e-7] {
            let cfg = ctx.quadrature.with_tol(tol);
            let err = (integrate_oscillatory(f, phase, damping, &cfg)?.value - exact).abs();
            // differences below 1e-13 are rounding, not refinement
            let growth = err - previous.max(1e-13);
            worst.update(growth.max(0.0), || format!("{name} at tol {tol:e}"));
            previous = err;
        }
    }
    Ok(Finding::at_most(
        worst.value,
        0.0,
        format!("largest error increase on halving tolerances: {:.3e} ({})", worst.value, worst.at),
    ))
}

fn truncation_point(ctx: &Context) -> Result<Finding, CliError> {
    let cases: [(fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64, &str); 2] = [
        (|r| (-r).exp() * r.cos(), |r| r, |r| r, "e^-r cos r"),
        (|r| (-r * r).exp(), |_| 0.0, |r| r * r, "e^-r²"),
    ];
    let mut worst = Worst::new();
    for (f, phase, damping, name) in cases {
        let res = integrate_oscillatory(f, phase, damping, &ctx.quadrature)?;
        let ratio = (-damping(res.truncation_point)).exp() / ctx.quadrature.tail_eps;
        worst.update(ratio, || format!("{name}: R* = {:.4}", res.truncation_point));
    }
    Ok(Finding::at_most(
        worst.value,
        1.0,
        format!("max exp(−damping(R*)) / tail_eps ({})", worst.at),
    ))
}

// ----------------------------------------------------------------- wright

const BETAS: [f64; 5] = [0.55, 0.65, 0.75, 0.85, 0.95];

fn wright_nonnegative(_: &Context) -> Result<Finding, CliError> {
    let mut most_negative: f64 = 0.0;
    let mut at = String::from("nowhere");
    for beta in BETAS {
        for i in 0..=400 {
            let z = 0.05 * i as f64;
            let v = mainardi(beta, z)?.value;
            if !v.is_finite() || v < most_negative {
                most_negative = if v.is_finite() { v } else { f64::NEG_INFINITY };
                at = format!("β = {beta}, z = {z}");
            }
        }
    }
    Ok(Finding::at_most(
        -most_negative,
        0.0,
        format!("Φ_β(z) ≥ 0 for β ∈ {BETAS:?}, z ∈ [0, 20]; most negative at {at}"),
    ))
}

fn wright_moment_integral(beta: f64, power: i32) -> Result<f64, CliError> {
    // Φ_β(z) decays like exp(−a z^{1/(1−β)})
    let p = 1.0 / (1.0 - beta);
    let a0 = (1.0 - beta) * beta.powf(beta * p);
    let cfg = QuadratureConfig {
        grading_exponent: 1.0,
        ..Default::default()
    }
    .with_tol(1e-12);
    let mut failure = None;
    let res = integrate_oscillatory(
        |z: f64| match mainardi(beta, z) {
            Ok(v) => z.powi(power) * v.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        |_| 0.0,
        |z| a0 * z.powf(p),
        &cfg,
    )?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(res.value),
    }
}

fn wright_normalization(_: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for beta in BETAS {
        let mass = wright_moment_integral(beta, 0)?;
        worst.update((mass - 1.0).abs(), || format!("β = {beta}: ∫Φ_β = {mass:.15}"));
    }
    Ok(Finding::at_most(worst.value, 1e-8, format!("worst |∫Φ_β − 1|: {}", worst.at)))
}

fn wright_half(_: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for i in 0..=200 {
        let z = 0.05 * i as f64;
        let exact = (-z * z / 4.0).exp() / PI.sqrt();
        worst.update((mainardi(0.5, z)?.value - exact).abs(), || format!("z = {z}"));
    }
    Ok(Finding::at_most(
        worst.value,
        1e-12,
        format!("max |Φ_1/2(z) − e^(−z²/4)/√π| on [0, 10] at {}", worst.at),
    ))
}

fn wright_moment(_: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for beta in BETAS {
        let m1 = wright_moment_integral(beta, 1)?;
        let exact = 1.0 / gamma(1.0 + beta);
        worst.update((m1 - exact).abs(), || format!("β = {beta}: {m1:.15} vs 1/Γ(1+β) = {exact:.15}"));
    }
    Ok(Finding::at_most(worst.value, 1e-8, format!("worst first moment: {}", worst.at)))
}

// ---------------------------------------------------------------- kernels

fn positivity(ctx: &Context) -> Result<Finding, CliError> {
    let floor = -10.0 * ctx.quadrature.abs_tol;
    let kinds = [
        KernelKind::PropagationW,
        KernelKind::Gs,
        KernelKind::Gc,
        KernelKind::Phi,
        KernelKind::Psi,
    ];
    let mut lowest = f64::INFINITY;
    let mut at = String::new();
    let mut evaluations = 0;
    for (label, p) in &ctx.problems {
        for kind in kinds {
            if kind == KernelKind::Psi && p.m() == 0 {
                continue;
            }
            for &space in &STANDARD_SPACE {
                for &t in &STANDARD_TIMES {
                    let v = evaluate(p, kind, space, t, &ctx.quadrature)?.value;
                    evaluations += 1;
                    if !(v >= lowest) {
                        lowest = v;
                        at = format!("{label}, {} at ({space}, {t})", kind.name());
                    }
                }
            }
        }
    }
    Ok(Finding {
        passed: lowest >= floor,
        measured: lowest,
        tolerance: floor,
        detail: format!("{evaluations} values, smallest {lowest:.3e} ({at}); must be ≥ −10·abs_tol"),
    })
}

fn monotonicity(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for (label, p) in &ctx.problems {
        let table = STANDARD_SPACE
            .iter()
            .map(|&x| {
                STANDARD_TIMES
                    .iter()
                    .map(|&t| propagation_w(p, x, t, &ctx.quadrature))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let slack = |a: f64, b: f64| 2.0 * a.max(b).max(ctx.quadrature.abs_tol);
        for (i, row) in table.iter().enumerate() {
            for k in 0..row.len() - 1 {
                let (a, b) = (row[k], row[k + 1]);
                let excess = a.value - b.value - slack(a.error_estimate, b.error_estimate);
                worst.update(excess.max(0.0), || {
                    format!("{label}: w decreases in t at x = {}", STANDARD_SPACE[i])
                });
            }
        }
        for k in 0..STANDARD_TIMES.len() {
            for i in 0..STANDARD_SPACE.len() - 1 {
                let (a, b) = (table[i][k], table[i + 1][k]);
                let excess = b.value - a.value - slack(a.error_estimate, b.error_estimate);
                worst.update(excess.max(0.0), || {
                    format!("{label}: w increases in x at t = {}", STANDARD_TIMES[k])
                });
            }
        }
    }
    Ok(Finding::at_most(
        worst.value,
        0.0,
        if worst.value > 0.0 {
            format!("violation {:.3e}: {}", worst.value, worst.at)
        } else {
            "w nondecreasing in t and nonincreasing in x on the standard grid".into()
        },
    ))
}

fn normalization(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    let problems = [
        ("telegraph", MultiTermProblem::telegraph()),
        ("alpha=1.9, alpha_1=1.5", MultiTermProblem::two_term(1.9, 1.5)?),
    ];
    for (label, p) in &problems {
        for t in [0.5, 1.0, 2.0] {
            for kind in [KernelKind::Phi, KernelKind::Psi, KernelKind::Gc] {
                let m = density_mass(p, kind, t, &ctx.quadrature)?;
                worst.update((m.total - 1.0).abs(), || format!("{label}, ∫{} at t = {t}", kind.name()));
            }
            let m = signaling_mass(p, t, 200.0, &ctx.quadrature)?;
            worst.update((m.total - 1.0).abs(), || format!("{label}, ∫G_s dt at x = {t}"));
        }
    }
    Ok(Finding::at_most(worst.value, 1e-6, format!("worst |mass − 1| = {:.3e} ({})", worst.value, worst.at)))
}

fn finite_speed(ctx: &Context) -> Result<Finding, CliError> {
    let p = MultiTermProblem::two_term(2.0, 1.5)?;
    let points = [
        (1.1, 1.0),
        (0.6, 0.5),
        (2.2, 2.0),
        (3.0, 1.0),
        (5.0, 4.0),
        (0.3, 0.25),
        (1.6, 1.5),
        (4.3, 4.0),
        (2.0, 0.5),
        (6.0, 3.0),
    ];
    let mut worst = Worst::new();
    for (x, t) in points {
        let w = propagation_w_uncut(&p, x, t, &ctx.quadrature)?;
        worst.update(w.value.abs(), || format!("w({x}, {t}) = {:.3e}", w.value));
    }
    Ok(Finding::at_most(
        worst.value,
        1e-6,
        format!("(α, α_1) = (2, 1.5), x > 1.05 t, no cutoff: max |w| at {}", worst.at),
    ))
}

fn infinite_speed(ctx: &Context) -> Result<Finding, CliError> {
    let p = MultiTermProblem::two_term(1.5, 1.0)?;
    let lw = propagation_w_log(&p, 10.0, 0.1, &ctx.quadrature)?;
    Ok(Finding {
        passed: lw.ln_value.is_finite() && lw.rel_error < 1e-6,
        measured: lw.ln_value,
        tolerance: f64::NEG_INFINITY,
        detail: format!(
            "(α, α_1) = (1.5, 1): ln w(10, 0.1) = {:.6e} (relative error {:.1e}), so w > 0",
            lw.ln_value, lw.rel_error
        ),
    })
}

fn wright_equivalence(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for alpha in [1.25, 1.5, 1.75] {
        let p = MultiTermProblem::new(alpha, 1.0, &[])?;
        for t in [0.5, 1.0, 2.0] {
            for tau in [0.1, 0.5, 1.0, 2.0, 4.0] {
                let phi = pdf_phi(&p, t, tau, &ctx.quadrature)?.value;
                let oracle = single_term_kernel(alpha, t, tau)?;
                worst.update((phi - oracle).abs(), || format!("α = {alpha}, (t, τ) = ({t}, {tau})"));
            }
        }
    }
    Ok(Finding::at_most(worst.value, 1e-6, format!("max |φ − Wright kernel| at {}", worst.at)))
}

/// `∫ ψ(t,σ) σ^{−α/2} Φ_{α/2}(τ σ^{−α/2}) dσ`.
pub fn composed_phi(p: &MultiTermProblem, t: f64, tau: f64, config: &QuadratureConfig) -> Result<f64, CliError> {
    let mut failure: Option<CliError> = None;
    let res = integrate_adaptive(
        |sigma: f64| {
            if sigma <= 0.0 {
                return 0.0;
            }
            let value = pdf_psi(p, t, sigma, config)
                .map_err(CliError::from)
                .and_then(|psi| Ok(psi.value * single_term_kernel(p.alpha(), sigma, tau)?));
            value.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        },
        0.0,
        psi_support(p, t),
        1e-9,
        1e-9,
        200,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(res.value),
    }
}

fn composition(ctx: &Context) -> Result<Finding, CliError> {
    let p = MultiTermProblem::two_term(1.9, 1.5)?;
    let mut worst = Worst::new();
    for t in [0.5, 1.0, 2.0] {
        for tau in [0.2, 0.5, 1.0] {
            let phi = pdf_phi(&p, t, tau, &ctx.quadrature)?.value;
            let composed = composed_phi(&p, t, tau, &ctx.quadrature)?;
            worst.update((phi - composed).abs(), || format!("(t, τ) = ({t}, {tau})"));
        }
    }
    Ok(Finding::at_most(
        worst.value,
        1e-4,
        format!("(α, α_1) = (1.9, 1.5): max |φ − ∫ψ·Wright| at {}", worst.at),
    ))
}

fn laplace(ctx: &Context) -> Result<Finding, CliError> {
    let lc = LaplaceConfig::default();
    let cases = [
        (MultiTermProblem::telegraph(), KernelKind::PropagationW, 1.0, 2.0, 1e-6),
        (MultiTermProblem::two_term(1.9, 1.5)?, KernelKind::Phi, 0.5, 1.0, 1e-6),
        (MultiTermProblem::two_term(1.5, 1.0)?, KernelKind::Psi, 0.5, 1.0, 1e-5),
    ];
    let mut worst_ratio: f64 = 0.0;
    let mut parts = Vec::new();
    for (p, kind, space, t, tol) in cases {
        let c = laplace_cross_check(&p, kind, space, t, &ctx.quadrature, &lc)?;
        worst_ratio = worst_ratio.max(c.discrepancy / tol);
        parts.push(format!("{} at ({space}, {t}): {:.2e} (≤ {tol:e})", kind.name(), c.discrepancy));
    }
    Ok(Finding::at_most(
        worst_ratio,
        1.0,
        format!("discrepancy / tolerance; {}", parts.join("; ")),
    ))
}

// ----------------------------------------------------------------- solver

fn eigenmode_bound(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for m in ctx.long_modes()? {
        for (t, u) in m.t_grid.iter().zip(&m.values) {
            worst.update(u.abs() - 1.0, || format!("λ = {:.4}, t = {t}", m.lambda));
        }
    }
    Ok(Finding::at_most(
        worst.value.max(0.0),
        1e-6,
        format!("(α, α_1) = (1.8, 1.5), n = 1..4, t ∈ [0, 20]: max |u_n| − 1 at {}", worst.at),
    ))
}

fn envelope_decay(ctx: &Context) -> Result<Finding, CliError> {
    let mut worst_ratio: f64 = 0.0;
    for m in ctx.long_modes()? {
        let envelope = |lo: f64, hi: f64| {
            m.t_grid
                .iter()
                .zip(&m.values)
                .filter(|(t, _)| **t >= lo && **t <= hi)
                .map(|(_, u)| u.abs())
                .fold(0.0, f64::max)
        };
        worst_ratio = worst_ratio.max(envelope(10.0, 20.0) / envelope(0.0, 10.0));
    }
    Ok(Finding {
        passed: worst_ratio < 1.0,
        measured: worst_ratio,
        tolerance: 1.0,
        detail: "max over n of sup_[10,20] |u_n| / sup_[0,10] |u_n| must be < 1".into(),
    })
}

fn parseval(_: &Context) -> Result<Finding, CliError> {
    let mut worst = Worst::new();
    for k in 1..=3 {
        let (coeffs, _) = sine_coefficients(&InitialProfile::SineMode { n: k }, 8, 1e-13);
        for (n, v) in coeffs.iter().enumerate() {
            let expected = if n + 1 == k { 1.0 } else { 0.0 };
            worst.update((v - expected).abs(), || format!("v = φ_{k}, coefficient {}", n + 1));
        }
    }
    Ok(Finding::at_most(worst.value, 1e-10, format!("max |v_n − δ_nk| at {}", worst.at)))
}

fn line_mass(ctx: &Context) -> Result<Finding, CliError> {
    let p = MultiTermProblem::two_term(1.9, 1.5)?;
    let v = InitialProfile::Indicator { a: -1.0, b: 1.0 };
    let mut worst = Worst::new();
    for t in [0.5, 1.0, 2.0] {
        let profile = PhiProfile::build(&p, t, &ctx.solver)?;
        let reach = 1.0 + profile.end;
        let u = |x: f64| line_profile_values(&profile, &v, &[x], 1e-12)[0];
        let mass: f64 = [(-reach, -1.0), (-1.0, 1.0), (1.0, reach)]
            .iter()
            .map(|&(a, b)| integrate_adaptive(u, a, b, 1e-9, 1e-10, 400).value)
            .sum();
        worst.update((mass - 2.0).abs(), || format!("t = {t}: ∫u = {mass:.10}"));
    }
    Ok(Finding::at_most(
        worst.value,
        1e-4,
        format!("(α, α_1) = (1.9, 1.5), v = 1 on [−1, 1]: worst {}", worst.at),
    ))
}

fn telegraph_eigenmode(ctx: &Context) -> Result<Finding, CliError> {
    let tel = MultiTermProblem::telegraph();
    let cfg = SolverConfig {
        force_kernel_path: true,
        ..ctx.solver
    };
    let ts: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
    let lambdas: Vec<f64> = (1..=4).map(dirichlet_eigenvalue).collect();
    let mut worst = Worst::new();
    for m in eigenmodes(&tel, &lambdas, &ts, &cfg)? {
        for (&t, u) in ts.iter().zip(&m.values) {
            let exact = damped_cosine(1.0, 1.0, m.lambda, t);
            worst.update((u - exact).abs(), || format!("λ = {:.4}, t = {t:.1}", m.lambda));
        }
    }
    Ok(Finding::at_most(
        worst.value,
        1e-5,
        format!("kernel path vs damped cosine, n = 1..4, t ∈ [0, 5]: max error at {}", worst.at),
    ))
}
