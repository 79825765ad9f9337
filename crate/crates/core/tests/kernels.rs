use fracsub_core::kernels::*;
use fracsub_core::problem::MultiTermProblem;
use fracsub_core::quadrature::{integrate_adaptive, LaplaceConfig, QuadratureConfig};
use fracsub_core::wright::single_term_kernel;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn suite() -> Vec<MultiTermProblem> {
    vec![
        MultiTermProblem::telegraph(),
        MultiTermProblem::two_term(1.9, 1.5).unwrap(),
        MultiTermProblem::two_term(2.0, 1.5).unwrap(),
        MultiTermProblem::two_term(1.5, 1.0).unwrap(),
        MultiTermProblem::new(1.5, 1.0, &[]).unwrap(),
    ]
}

#[test]
fn propagation_limits_in_time() {
    for p in suite() {
        let early = propagation_w(&p, 0.1, 1e-3, &cfg()).unwrap().value;
        let late = propagation_w(&p, 0.1, 1e3, &cfg()).unwrap().value;
        assert!(early.abs() <= 0.05, "α = {}: w(0.1, 1e−3) = {early}", p.alpha());
        assert!((late - 1.0).abs() <= 0.05, "α = {}: w(0.1, 1e3) = {late}", p.alpha());
    }
}

#[test]
fn infinite_speed_below_two() {
    let p = MultiTermProblem::two_term(1.5, 1.0).unwrap();
    for (x, t) in [(0.5, 0.1), (2.0, 0.1), (5.0, 0.1), (0.5, 1.0), (2.0, 1.0), (5.0, 1.0), (10.0, 0.1)] {
        let w = propagation_w(&p, x, t, &cfg()).unwrap();
        if w.value > 10.0 * w.error_estimate.max(1e-15) {
            continue;
        }
        // below double resolution: positivity from the log-space evaluation
        let lw = propagation_w_log(&p, x, t, &cfg()).unwrap();
        assert!(lw.ln_value.is_finite() && lw.rel_error < 1e-6, "w({x}, {t}): {w:?}, {lw:?}");
    }
}

#[test]
fn log_propagation_matches_direct_values() {
    for p in [MultiTermProblem::two_term(1.5, 1.0).unwrap(), MultiTermProblem::two_term(1.9, 1.5).unwrap()] {
        for (x, t) in [(0.5, 0.5), (1.0, 1.0), (2.0, 1.0), (0.3, 2.0)] {
            let w = propagation_w(&p, x, t, &cfg()).unwrap().value;
            let lw = propagation_w_log(&p, x, t, &cfg()).unwrap();
            assert!((lw.ln_value.exp() - w).abs() <= 1e-8, "α = {}, w({x}, {t}) = {w} vs {lw:?}", p.alpha());
        }
    }
}

#[test]
fn finite_speed_without_cutoff() {
    let p = MultiTermProblem::two_term(2.0, 1.5).unwrap();
    for (x, t) in [(1.1, 1.0), (0.6, 0.5), (2.2, 2.0), (3.0, 1.0), (5.0, 4.0)] {
        let w = propagation_w_uncut(&p, x, t, &cfg()).unwrap();
        assert!(w.value.abs() <= 1e-6, "w({x}, {t}) = {w:?}");
        assert_eq!(propagation_w(&p, x, t, &cfg()).unwrap().value, 0.0);
    }
}

#[test]
fn normalisations() {
    for p in [MultiTermProblem::telegraph(), MultiTermProblem::two_term(1.9, 1.5).unwrap()] {
        for t in [0.5, 1.0, 2.0] {
            for kind in [KernelKind::Phi, KernelKind::Psi, KernelKind::Gc] {
                let m = density_mass(&p, kind, t, &cfg()).unwrap();
                assert!((m.total - 1.0).abs() <= 1e-6, "α = {}, {}, t = {t}: {m:?}", p.alpha(), kind.name());
            }
            let m = signaling_mass(&p, t, 200.0, &cfg()).unwrap();
            assert!((m.total - 1.0).abs() <= 1e-6, "α = {}, G_s, x = {t}: {m:?}", p.alpha());
        }
    }
}

#[test]
fn classical_wave_signal_is_a_pulse_at_the_front() {
    let wave = MultiTermProblem::classical_wave();
    for x in [0.5, 1.0] {
        let atom = gs_atom(&wave, x).unwrap();
        assert_eq!(atom.location, x);
        assert_eq!(atom.weight, 1.0);
        for t in [0.5 * x, 1.5 * x] {
            assert_eq!(signaling_gs(&wave, x, t, &cfg()).unwrap().value, 0.0);
        }
        let m = signaling_mass(&wave, x, 10.0, &cfg()).unwrap();
        assert!((m.total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn signal_is_nonnegative_and_matches_time_derivative() {
    let p = MultiTermProblem::two_term(1.9, 1.5).unwrap();
    let tol = 10.0 * cfg().abs_tol;
    for x in [0.2, 0.7, 1.5] {
        for t in [0.3, 1.0, 3.0] {
            let gs = signaling_gs(&p, x, t, &cfg()).unwrap().value;
            assert!(gs >= -tol, "G_s({x}, {t}) = {gs}");
            let h = 1e-3;
            let w = |s: f64| propagation_w(&p, x, s, &cfg()).unwrap().value;
            let fd = (8.0 * (w(t + h) - w(t - h)) - (w(t + 2.0 * h) - w(t - 2.0 * h))) / (12.0 * h);
            assert!((gs - fd).abs() <= 1e-5, "G_s({x}, {t}) = {gs} vs {fd}");
        }
    }
}

#[test]
fn cauchy_single_term_is_wright() {
    let p = MultiTermProblem::new(1.5, 1.0, &[]).unwrap();
    for x in [-2.0, -0.4, 0.3, 1.0, 2.5] {
        for t in [0.5, 1.0, 2.0] {
            let gc = cauchy_gc(&p, x, t, &cfg()).unwrap().value;
            let oracle = 0.5 * single_term_kernel(1.5, t, x.abs()).unwrap();
            assert!((gc - oracle).abs() <= 1e-6, "G_c({x}, {t}) = {gc} vs {oracle}");
        }
    }
}

#[test]
fn phi_is_minus_space_derivative_of_w() {
    for p in [MultiTermProblem::two_term(1.9, 1.5).unwrap(), MultiTermProblem::telegraph()] {
        for (t, tau) in [(1.0, 0.4), (2.0, 1.1), (0.5, 0.2)] {
            let phi = pdf_phi(&p, t, tau, &cfg()).unwrap().value;
            let h = 1e-4;
            let fd = (propagation_w(&p, tau - h, t, &cfg()).unwrap().value
                - propagation_w(&p, tau + h, t, &cfg()).unwrap().value)
                / (2.0 * h);
            let tol = (50.0 * cfg().abs_tol).max(1e-5);
            assert!((phi - fd).abs() <= tol, "α = {}: φ({t}, {tau}) = {phi} vs {fd}", p.alpha());
        }
    }
}

#[test]
fn laplace_cross_checks() {
    let lc = LaplaceConfig::default();
    let cases = [
        (MultiTermProblem::telegraph(), KernelKind::PropagationW, 1.0, 2.0, 1e-6),
        (MultiTermProblem::two_term(1.9, 1.5).unwrap(), KernelKind::Phi, 0.5, 1.0, 1e-6),
        (MultiTermProblem::two_term(1.5, 1.0).unwrap(), KernelKind::Psi, 0.5, 1.0, 1e-5),
    ];
    for (p, kind, space, t, tol) in cases {
        let c = laplace_cross_check(&p, kind, space, t, &cfg(), &lc).unwrap();
        assert!(c.discrepancy <= tol, "{c:?}");
    }
}

#[test]
fn composition_of_psi_with_single_term_kernel() {
    // φ(t,τ) = ∫ ψ(t,σ) σ^{−α/2} Φ_{α/2}(τ σ^{−α/2}) dσ
    let p = MultiTermProblem::two_term(1.9, 1.5).unwrap();
    let (t, tau) = (1.0, 0.5);
    let inner = |sigma: f64| {
        if sigma <= 0.0 {
            return 0.0;
        }
        pdf_psi(&p, t, sigma, &cfg()).unwrap().value * single_term_kernel(1.9, sigma, tau).unwrap()
    };
    let composed = integrate_adaptive(inner, 0.0, psi_support(&p, t), 1e-9, 1e-9, 200).value;
    let phi = pdf_phi(&p, t, tau, &cfg()).unwrap().value;
    assert!((phi - composed).abs() <= 1e-4, "{phi} vs {composed}");
}

#[test]
fn field_serialises_with_atoms() {
    let tel = MultiTermProblem::telegraph();
    let field = evaluate_field(&tel, KernelKind::Phi, Slice::FixedT(1.0), &[0.2, 0.5, 0.9], &cfg()).unwrap();
    assert_eq!(field.atoms.len(), 1);
    let csv = field.to_csv(&["problem: telegraph".into()]);
    assert!(csv.starts_with("# problem: telegraph\n"));
    assert!(csv.contains("# atom: location = 1.0000000000000000e0"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
    let json = serde_json::to_string(&field).unwrap();
    let back: KernelField = serde_json::from_str(&json).unwrap();
    assert_eq!(back, field);
}
