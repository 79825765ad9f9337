//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use fracsub_core::bernstein::{check_bernstein_sqrt_g, check_concavity_scan, GridSpec};
use fracsub_core::kernels::{
    density_mass, evaluate, pdf_phi, pdf_psi, propagation_w, propagation_w_log, propagation_w_uncut, psi_support,
    signaling_mass,
};
use fracsub_core::num_complex::Complex64;
use fracsub_core::problem::{validate_with, ProblemSpec};
use fracsub_core::quadrature::integrate_adaptive;
use fracsub_core::solver::{dirichlet_eigenvalue, eigenmodes, SolverConfig};
use fracsub_core::wright::single_term_kernel;
use fracsub_core::{KernelKind, MultiTermProblem, QuadratureConfig, Term};

type Criterion = (&'static str, fn() -> Result<String, String>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("classical-wave step", classical_step),
        ("single-term Wright equivalence", wright_equivalence),
        ("normalizations", normalizations),
        ("finite vs infinite speed", finite_vs_infinite_speed),
        ("telegraph eigenmodes", telegraph_eigenmodes),
        ("Laplace-domain cross-checks", laplace_cross_checks),
        ("Bernstein counterexample and validated suite", bernstein),
        ("composition identity", composition),
        ("monotonicity and positivity sweeps", monotonicity_positivity),
        ("figure reproduction", figures),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.1} s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.1} s): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn two_term(alpha: f64, order: f64) -> MultiTermProblem {
    MultiTermProblem::two_term(alpha, order).unwrap()
}

/// Largest of `values` with its label, compared against `tol`.
fn verdict(worst: f64, at: &str, tol: f64, what: &str) -> Result<String, String> {
    let line = format!("{what}: max {worst:.3e} (tolerance {tol:e}) at {at}");
    if worst <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

struct Worst(f64, String);

impl Worst {
    fn new() -> Self {
        Worst(0.0, "-".into())
    }

    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        if v > self.0 || v.is_nan() {
            self.0 = v;
            self.1 = at();
        }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

// [1] w(x,t) = H(t − x) for the classical wave, from the integral
// representation itself (no front shortcut)
fn classical_step() -> Result<String, String> {
    let wave = MultiTermProblem::classical_wave();
    let grid = linspace(0.1, 3.0, 20);
    let mut worst = Worst::new();
    let mut n = 0;
    for &x in &grid {
        for &t in &grid {
            if (x - t).abs() < 0.05 {
                continue;
            }
            let w = propagation_w_uncut(&wave, x, t, &cfg()).map_err(|e| e.to_string())?.value;
            let heaviside = if t > x { 1.0 } else { 0.0 };
            n += 1;
            worst.see((w - heaviside).abs(), || format!("(x, t) = ({x:.3}, {t:.3})"));
        }
    }
    verdict(worst.0, &worst.1, 1e-4, &format!("|w − H(t − x)| over {n} points"))
}

// [2] single-term φ against t^{−α/2} Φ_{α/2}(τ t^{−α/2})
fn wright_equivalence() -> Result<String, String> {
    let mut worst = Worst::new();
    for alpha in [1.25, 1.5, 1.75] {
        let p = MultiTermProblem::new(alpha, 1.0, &[]).unwrap();
        for t in [0.5, 1.0, 2.0] {
            for tau in [0.1, 0.5, 1.0, 2.0, 4.0] {
                let phi = pdf_phi(&p, t, tau, &cfg()).map_err(|e| e.to_string())?.value;
                let oracle = single_term_kernel(alpha, t, tau).map_err(|e| e.to_string())?;
                worst.see((phi - oracle).abs(), || format!("α = {alpha}, (t, τ) = ({t}, {tau})"));
            }
        }
    }
    verdict(worst.0, &worst.1, 1e-6, "|φ − Wright kernel| on 3 α × 3 t × 5 τ")
}

// [3] unit mass of φ, ψ, G_c (in τ or x) and G_s (in t)
fn normalizations() -> Result<String, String> {
    let mut worst = Worst::new();
    for (label, p) in [("telegraph", MultiTermProblem::telegraph()), ("(1.9, 1.5)", two_term(1.9, 1.5))] {
        for t in [0.5, 1.0, 2.0] {
            for kind in [KernelKind::Phi, KernelKind::Psi, KernelKind::Gc] {
                let m = density_mass(&p, kind, t, &cfg()).map_err(|e| e.to_string())?;
                worst.see((m.total - 1.0).abs(), || format!("{label}, {} at t = {t}", kind.name()));
            }
            let m = signaling_mass(&p, t, 200.0, &cfg()).map_err(|e| e.to_string())?;
            worst.see((m.total - 1.0).abs(), || format!("{label}, G_s at x = {t}"));
        }
    }
    verdict(worst.0, &worst.1, 1e-6, "|mass − 1|")
}

// [4] α = 2: w vanishes beyond x = t/√c without the cutoff; α < 2: w > 0 far out
fn finite_vs_infinite_speed() -> Result<String, String> {
    let p = two_term(2.0, 1.5);
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
        assert!(x > 1.05 * t);
        let w = propagation_w_uncut(&p, x, t, &cfg()).map_err(|e| e.to_string())?.value;
        worst.see(w.abs(), || format!("(x, t) = ({x}, {t})"));
    }
    let finite = verdict(worst.0, &worst.1, 1e-6, "(2, 1.5): |w| beyond the front")?;

    // w(10, 0.1) ≈ e^{−10⁶} is below f64 range; it is evaluated in log form,
    // which must first reproduce w where w is representable
    let q = two_term(1.5, 1.0);
    for (x, t) in [(0.5, 0.5), (2.0, 1.0), (1.0, 0.2)] {
        let direct = propagation_w(&q, x, t, &cfg()).map_err(|e| e.to_string())?.value;
        let logged = propagation_w_log(&q, x, t, &cfg()).map_err(|e| e.to_string())?;
        let rel = (logged.ln_value.exp() - direct).abs() / direct;
        if !(rel <= 1e-6) {
            return Err(format!("log form disagrees at ({x}, {t}): {:e} vs {direct:e}", logged.ln_value.exp()));
        }
    }
    let far = propagation_w_log(&q, 10.0, 0.1, &cfg()).map_err(|e| e.to_string())?;
    if !(far.ln_value.is_finite() && far.rel_error < 1e-6) {
        return Err(format!("{finite}; w(10, 0.1) not resolved: {far:?}"));
    }
    Ok(format!(
        "{finite}; (1.5, 1): ln w(10, 0.1) = {:.6e} ± {:.1e} (relative), so w(10, 0.1) > 0",
        far.ln_value, far.rel_error
    ))
}

/// Solution of `u'' + u' + λu = 0`, `u(0) = 1`, `u'(0) = 0`.
fn telegraph_mode(lambda: f64, t: f64) -> f64 {
    let omega = (lambda - 0.25).sqrt();
    (-0.5 * t).exp() * ((omega * t).cos() + (omega * t).sin() / (2.0 * omega))
}

// [5] eigenmodes through the kernel against the damped cosine
fn telegraph_eigenmodes() -> Result<String, String> {
    let tel = MultiTermProblem::telegraph();
    let cfg = SolverConfig {
        force_kernel_path: true,
        ..SolverConfig::default()
    };
    let ts = linspace(0.0, 5.0, 101);
    let lambdas: Vec<f64> = (1..=4).map(dirichlet_eigenvalue).collect();
    let modes = eigenmodes(&tel, &lambdas, &ts, &cfg).map_err(|e| e.to_string())?;
    let mut worst = Worst::new();
    for (n, m) in modes.iter().enumerate() {
        if m.closed_form {
            return Err("kernel path was bypassed".into());
        }
        for (&t, u) in ts.iter().zip(&m.values) {
            worst.see((u - telegraph_mode((n as f64 + 1.0).powi(2) * PI * PI, t)).abs(), || {
                format!("n = {}, t = {t:.2}", n + 1)
            });
        }
    }
    verdict(worst.0, &worst.1, 1e-5, "|u_n − damped cosine|, n = 1..4, t ∈ [0, 5]")
}

/// `g(s) = c s^α + Σ c_j s^{α_j}` on the principal branch.
fn symbol(alpha: f64, terms: &[(f64, f64)], s: Complex64) -> Complex64 {
    terms.iter().fold(s.powf(alpha), |acc, &(order, coeff)| acc + coeff * s.powf(order))
}

/// `I_1` by its power series (arguments here stay below 2).
fn bessel_i1(z: f64) -> f64 {
    let (mut term, mut sum) = (z / 2.0, 0.0);
    for k in 0..60 {
        sum += term;
        term *= (z / 2.0).powi(2) / ((k + 1) as f64 * (k + 2) as f64);
    }
    sum
}

/// Telegraph signaling function for `u_tt + u_t = u_xx`: the front step
/// `e^{−x/2}` plus the Bessel wake behind it.
fn telegraph_w(x: f64, t: f64) -> f64 {
    if t <= x {
        return 0.0;
    }
    let wake = |tau: f64| {
        let r = (tau * tau - x * x).sqrt();
        let ratio = if r > 0.0 { bessel_i1(0.5 * r) / r } else { 0.25 };
        (-0.5 * tau).exp() * ratio
    };
    (-0.5 * x).exp() + 0.5 * x * integrate_adaptive(wake, x, t, 1e-14, 1e-14, 500).value
}

/// Bromwich integral along `Re s = gamma`, summed in half-periods of
/// `e^{iyt}`; an algebraically decaying tail is closed by repeatedly averaging
/// the last partial sums.
fn bromwich(transform: &dyn Fn(Complex64) -> Complex64, t: f64, gamma: f64) -> f64 {
    let width = PI / t;
    let integrand = |y: f64| (transform(Complex64::new(gamma, y)) * Complex64::new(0.0, y * t).exp()).re;
    let (mut total, mut quiet) = (0.0, 0);
    let mut partial = Vec::new();
    for k in 0..20_000 {
        let a = k as f64 * width;
        let panel = integrate_adaptive(integrand, a, a + width, 1e-16, 1e-13, 200).value;
        total += panel;
        partial.push(total);
        quiet = if panel.abs() < 1e-15 { quiet + 1 } else { 0 };
        if quiet == 20 {
            break;
        }
    }
    let mut tail = partial.split_off(partial.len().saturating_sub(24));
    while tail.len() > 1 {
        tail = tail.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    (gamma * t).exp() / PI * tail[0]
}

// [6] real-axis kernels against independent inversions of their transforms
fn laplace_cross_checks() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = true;

    let w = propagation_w(&MultiTermProblem::telegraph(), 1.0, 2.0, &cfg()).map_err(|e| e.to_string())?.value;
    let gap = (w - telegraph_w(1.0, 2.0)).abs();
    ok &= gap <= 1e-6;
    parts.push(format!("telegraph w(1, 2) vs Bessel form: {gap:.2e} (≤ 1e-6)"));

    let phi_hat = |s: Complex64| {
        let q = symbol(1.9, &[(1.5, 1.0)], s).sqrt();
        q / s * (-0.5 * q).exp()
    };
    let psi_hat = |s: Complex64| {
        let l = symbol(1.5, &[(1.0, 1.0)], s).powf(1.0 / 1.5);
        l / s * (-0.5 * l).exp()
    };
    let cases: [(&str, MultiTermProblem, KernelKind, f64, &dyn Fn(Complex64) -> Complex64); 2] = [
        ("(1.9, 1.5) φ(1, 0.5)", two_term(1.9, 1.5), KernelKind::Phi, 1e-6, &phi_hat),
        ("(1.5, 1) ψ(1, 0.5)", two_term(1.5, 1.0), KernelKind::Psi, 1e-6, &psi_hat),
    ];
    for (label, p, kind, tol, transform) in cases {
        let direct = evaluate(&p, kind, 0.5, 1.0, &cfg()).map_err(|e| e.to_string())?.value;
        let (near, far) = (bromwich(transform, 1.0, 0.5), bromwich(transform, 1.0, 1.5));
        let gap = (direct - near).abs();
        // the oracle must itself be settled well below the tolerance
        ok &= gap <= tol && (near - far).abs() <= 0.1 * tol;
        parts.push(format!("{label}: {gap:.2e} (≤ {tol:e}, oracle spread {:.1e})", (near - far).abs()));
    }

    // eigenmodes of (1.8, 1.5): û_n = 1/s − λ_n/(s(g + λ_n))
    let p = two_term(1.8, 1.5);
    let ts = [0.5, 1.0, 2.0];
    let lambdas: Vec<f64> = (1..=2).map(dirichlet_eigenvalue).collect();
    let modes = eigenmodes(&p, &lambdas, &ts, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let mut worst = Worst::new();
    let mut spread: f64 = 0.0;
    for (m, &lambda) in modes.iter().zip(&lambdas) {
        let remainder = move |s: Complex64| lambda / (s * (symbol(1.8, &[(1.5, 1.0)], s) + lambda));
        for (&t, &u) in ts.iter().zip(&m.values) {
            let (near, far) = (1.0 - bromwich(&remainder, t, 0.5), 1.0 - bromwich(&remainder, t, 1.5));
            spread = spread.max((near - far).abs());
            worst.see((u - near).abs(), || format!("λ = {lambda:.4}, t = {t}"));
        }
    }
    ok &= worst.0 <= 1e-6 && spread <= 1e-7;
    parts.push(format!("(1.8, 1.5) u_1, u_2 at t ∈ {{0.5, 1, 2}}: {:.2e} at {} (≤ 1e-6, oracle spread {spread:.1e})", worst.0, worst.1));
    let line = parts.join("; ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

// [7] √g loses concavity for (1.9, 0.3); every validated problem passes
fn bernstein() -> Result<String, String> {
    let spec = ProblemSpec {
        alpha: 1.9,
        c: 1.0,
        terms: vec![Term::new(0.3, 1.0)],
    };
    let p = validate_with(&spec, true).map_err(|e| e.to_string())?;
    let witness = check_concavity_scan(&p, &GridSpec::default())
        .map_err(|e| e.to_string())?
        .ok_or("no convex point of √g found for (1.9, 0.3)")?;
    // plain second difference of s ↦ √(s^1.9 + s^0.3) at the witness
    let root = |s: f64| (s.powf(1.9) + s.powf(0.3)).sqrt();
    let (s, h) = (witness.s, 1e-3 * witness.s);
    let second = (root(s + h) - 2.0 * root(s) + root(s - h)) / (h * h);
    if !(second > 0.0) {
        return Err(format!("independent second difference at s = {s} is {second:e}"));
    }
    let suite = [
        MultiTermProblem::classical_wave(),
        MultiTermProblem::telegraph(),
        two_term(2.0, 1.5),
        two_term(1.9, 1.5),
        two_term(1.8, 1.5),
        two_term(1.5, 1.0),
        two_term(1.9, 0.9),
        MultiTermProblem::new(1.5, 1.0, &[]).unwrap(),
        MultiTermProblem::new(1.9, 2.0, &[(1.5, 0.5), (1.1, 2.0)]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for q in &suite {
        let report = check_bernstein_sqrt_g(q, &GridSpec::default(), 6).map_err(|e| e.to_string())?;
        if !report.verdict.passed {
            return Err(format!("validated problem {:?} fails: {}", q.spec(), report.statement()));
        }
        worst = worst.max(report.max_violation);
    }
    Ok(format!(
        "(1.9, 0.3): convex at s = {s:.4e} (second difference {second:.3e}); {} validated problems pass at 1e-8 (max violation {worst:.1e})",
        suite.len()
    ))
}

// [8] φ = ∫ ψ(t,σ) σ^{−α/2} Φ_{α/2}(τ σ^{−α/2}) dσ
fn composition() -> Result<String, String> {
    let p = two_term(1.9, 1.5);
    let mut worst = Worst::new();
    for t in [0.5, 1.0, 2.0] {
        for tau in [0.2, 0.5, 1.0] {
            let inner = |sigma: f64| {
                if sigma <= 0.0 {
                    return 0.0;
                }
                pdf_psi(&p, t, sigma, &cfg()).unwrap().value * single_term_kernel(1.9, sigma, tau).unwrap()
            };
            let composed = integrate_adaptive(inner, 0.0, psi_support(&p, t), 1e-9, 1e-9, 200).value;
            let phi = pdf_phi(&p, t, tau, &cfg()).map_err(|e| e.to_string())?.value;
            worst.see((phi - composed).abs(), || format!("(t, τ) = ({t}, {tau})"));
        }
    }
    verdict(worst.0, &worst.1, 1e-4, "(1.9, 1.5): |φ − composition| at 9 points")
}

// [9] w monotone in t and x, every kernel ≥ −10·tol on the standard grid
fn monotonicity_positivity() -> Result<String, String> {
    let space = [0.15, 0.35, 0.7, 1.3, 2.6];
    let times = [0.2, 0.5, 1.0, 2.0, 4.0];
    let problems = [
        MultiTermProblem::classical_wave(),
        MultiTermProblem::telegraph(),
        two_term(2.0, 1.5),
        two_term(1.9, 1.5),
        two_term(1.5, 1.0),
        MultiTermProblem::new(1.5, 1.0, &[]).unwrap(),
    ];
    let floor = -10.0 * cfg().abs_tol;
    let mut lowest = f64::INFINITY;
    let mut monotone_excess: f64 = 0.0;
    for p in &problems {
        let w: Vec<Vec<_>> = space
            .iter()
            .map(|&x| times.iter().map(|&t| propagation_w(p, x, t, &cfg()).unwrap()).collect())
            .collect();
        let slack = |a: f64, b: f64| 2.0 * a.max(b).max(cfg().abs_tol);
        for i in 0..space.len() {
            for k in 0..times.len() {
                if k + 1 < times.len() {
                    let (a, b) = (w[i][k], w[i][k + 1]);
                    monotone_excess = monotone_excess.max(a.value - b.value - slack(a.error_estimate, b.error_estimate));
                }
                if i + 1 < space.len() {
                    let (a, b) = (w[i][k], w[i + 1][k]);
                    monotone_excess = monotone_excess.max(b.value - a.value - slack(a.error_estimate, b.error_estimate));
                }
            }
        }
        for kind in [KernelKind::PropagationW, KernelKind::Gs, KernelKind::Gc, KernelKind::Phi, KernelKind::Psi] {
            if kind == KernelKind::Psi && p.m() == 0 {
                continue;
            }
            for &x in &space {
                for &t in &times {
                    lowest = lowest.min(evaluate(p, kind, x, t, &cfg()).map_err(|e| e.to_string())?.value);
                }
            }
        }
    }
    let line = format!("monotonicity excess {monotone_excess:.1e} (must be ≤ 0); smallest kernel value {lowest:.2e} (≥ {floor:e})");
    if monotone_excess <= 0.0 && lowest >= floor {
        Ok(line)
    } else {
        Err(line)
    }
}

/// Runs `fracsub figure n` and parses its CSV into header and numeric rows.
fn figure_table(n: u8) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fracsub"))
        .args(["figure", &n.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("figure {n} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().ok_or("empty output")?.split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().map_err(|e| format!("{v}: {e}"))).collect())
        .collect::<Result<Vec<Vec<f64>>, String>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != header.len() || r.iter().any(|v| !v.is_finite())) {
        return Err(format!("figure {n}: malformed or non-finite table"));
    }
    Ok((header, rows))
}

// [10] all six figures run; qualitative shapes hold
fn figures() -> Result<String, String> {
    let times = [0.25, 0.5, 1.0, 2.0];
    let mut notes = Vec::new();

    // telegraph: w jumps at x = t by e^{−t/2} (from √(s² + s) = s + 1/2 + O(1/s))
    let (_, rows) = figure_table(1)?;
    for (j, &t) in times.iter().enumerate() {
        let below = rows.iter().filter(|r| r[0] < t).last().ok_or("no x below the front")?;
        let above = rows.iter().find(|r| r[0] > t).ok_or("no x beyond the front")?;
        if rows.iter().filter(|r| r[0] > t).any(|r| r[j + 1] != 0.0) {
            return Err(format!("figure 1: w ≠ 0 beyond the front at t = {t}"));
        }
        let jump = below[j + 1] - above[j + 1];
        if (jump - (-0.5 * t).exp()).abs() > 0.05 {
            return Err(format!("figure 1: jump {jump} at t = {t}, expected ≈ {}", (-0.5 * t).exp()));
        }
    }
    notes.push("fig 1 step of height e^{−t/2} at x = t".to_string());

    // α = 2, α_1 = 1.5: finite speed, and w → 0 at the front instead of jumping
    let (_, rows) = figure_table(2)?;
    let p = two_term(2.0, 1.5);
    for (j, &t) in times.iter().enumerate() {
        if rows.iter().filter(|r| r[0] > t).any(|r| r[j + 1] != 0.0) {
            return Err(format!("figure 2: w ≠ 0 beyond the front at t = {t}"));
        }
        if rows.windows(2).any(|w| w[1][j + 1] > w[0][j + 1]) {
            return Err(format!("figure 2: w increases in x at t = {t}"));
        }
        let behind = propagation_w(&p, t - 1e-4, t, &cfg()).map_err(|e| e.to_string())?.value;
        if behind > 1e-3 {
            return Err(format!("figure 2: w(t − 1e-4, t) = {behind:e} at t = {t}"));
        }
    }
    notes.push("fig 2 vanishes beyond x = t, continuously".to_string());

    // α < 2: strictly positive, decreasing tail (in log form)
    let (header, rows) = figure_table(3)?;
    let logs: Vec<usize> = (0..header.len()).filter(|&j| header[j].starts_with("ln_w")).collect();
    if logs.len() != 4 {
        return Err("figure 3: missing ln w columns".into());
    }
    for &j in &logs {
        if rows.windows(2).any(|w| !(w[1][j] < w[0][j])) {
            return Err(format!("figure 3: {} is not strictly decreasing", header[j]));
        }
    }
    let tail = rows.last().unwrap();
    notes.push(format!("fig 3 positive tail, ln w(3, 0.25) = {:.1}", tail[logs[0]]));

    for n in [4, 5] {
        let (_, rows) = figure_table(n)?;
        let lowest = rows.iter().flat_map(|r| r[1..].iter().copied()).fold(f64::INFINITY, f64::min);
        if lowest < -1e-8 {
            return Err(format!("figure {n}: negative density {lowest:e}"));
        }
    }
    notes.push("figs 4–5 nonnegative densities".to_string());

    // eigenmodes start at 1 and oscillate with decaying envelope
    let (_, rows) = figure_table(6)?;
    for j in 1..=4 {
        let u: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[j])).collect();
        if (u[0].1 - 1.0).abs() > 1e-6 {
            return Err(format!("figure 6: u_{j}(0) = {}", u[0].1));
        }
        let sign_changes = u.windows(2).filter(|w| w[0].1 * w[1].1 < 0.0).count();
        let envelope = |lo: f64, hi: f64| {
            u.iter()
                .filter(|(t, _)| *t >= lo && *t <= hi)
                .map(|(_, v)| v.abs())
                .fold(0.0, f64::max)
        };
        if sign_changes == 0 || !(envelope(5.0, 10.0) < envelope(0.0, 5.0)) {
            return Err(format!("figure 6: u_{j} is not a damped oscillation ({sign_changes} sign changes)"));
        }
    }
    notes.push("fig 6 u_n(0) = 1, damped oscillations".to_string());
    Ok(notes.join("; "))
}
