//! Data behind the six standard figures.
//!
//! Coefficients are `c = c_1 = 1` throughout. Figures 1–3 show `w(x,·)` and
//! figures 4–5 show `φ(t,·)` at `t ∈ {0.25, 0.5, 1, 2}` (figure 5 at `t = 2`
//! only); spatial grids are cell midpoints so that no sample sits on a front.

use fracsub_core::kernels::{evaluate_field, propagation_w_log, Slice};
use fracsub_core::problem::ProblemSpec;
use fracsub_core::solver::{self, dirichlet_eigenvalue};
use fracsub_core::{KernelKind, MultiTermProblem, Term};

use crate::config::{validate_problem, Grid};
use crate::output::{Cell, CommandName, Document, ProblemEntry};
use crate::{CliError, Settings};

const TIMES: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
/// Lower orders compared in figure 5 (α = 1.9).
pub const FIGURE5_ORDERS: [f64; 4] = [1.0, 1.25, 1.5, 1.75];

fn two_term(alpha: f64, order: f64) -> ProblemSpec {
    ProblemSpec {
        alpha,
        c: 1.0,
        terms: vec![Term::new(order, 1.0)],
    }
}

pub fn figure(settings: &Settings, number: u8) -> Result<Document, CliError> {
    let mut m = settings.manifest(CommandName::Figure);
    m.figure = Some(number);
    m.problems.clear();
    match number {
        1..=3 => {
            let (label, spec) = match number {
                1 => ("telegraph", two_term(2.0, 1.0)),
                2 => ("alpha=2, alpha_1=1.5", two_term(2.0, 1.5)),
                _ => ("alpha=1.5, alpha_1=1", two_term(1.5, 1.0)),
            };
            let p = validate_problem(&spec, false)?;
            m.problems.push(ProblemEntry {
                label: label.into(),
                spec,
            });
            let xg = Grid::midpoints(0.0, 3.0, 120);
            let xs = xg.resolve("x")?;
            m.grids.insert("x".into(), xg);
            m.grids.insert("t".into(), Grid::values(TIMES.to_vec()));
            propagation_figure(settings, m, &p, &xs)
        }
        4 => {
            let spec = two_term(1.9, 1.5);
            let p = validate_problem(&spec, false)?;
            m.problems.push(ProblemEntry {
                label: "alpha=1.9, alpha_1=1.5".into(),
                spec,
            });
            let taug = Grid::midpoints(0.0, 4.0, 160);
            let taus = taug.resolve("tau")?;
            m.grids.insert("tau".into(), taug);
            m.grids.insert("t".into(), Grid::values(TIMES.to_vec()));
            let columns = TIMES.iter().map(|t| format!("phi(t={t})")).collect();
            let slices = TIMES.iter().map(|&t| (p.clone(), t)).collect();
            density_figure(settings, m, slices, columns, &taus)
        }
        5 => {
            let mut slices = Vec::new();
            for &order in &FIGURE5_ORDERS {
                let spec = two_term(1.9, order);
                slices.push((validate_problem(&spec, false)?, 2.0));
                m.problems.push(ProblemEntry {
                    label: format!("alpha=1.9, alpha_1={order}"),
                    spec,
                });
            }
            let taug = Grid::midpoints(0.0, 6.0, 120);
            let taus = taug.resolve("tau")?;
            m.grids.insert("tau".into(), taug);
            m.grids.insert("t".into(), Grid::values(vec![2.0]));
            let columns = FIGURE5_ORDERS.iter().map(|o| format!("phi(alpha_1={o})")).collect();
            density_figure(settings, m, slices, columns, &taus)
        }
        6 => {
            let spec = two_term(1.8, 1.5);
            let p = validate_problem(&spec, false)?;
            m.problems.push(ProblemEntry {
                label: "alpha=1.8, alpha_1=1.5".into(),
                spec,
            });
            let tg = Grid::linear(0.0, 10.0, 201);
            let ts = tg.resolve("t")?;
            m.grids.insert("t".into(), tg);
            m.parameters.insert("modes".into(), "4".into());
            let cfg = settings.solver_config(4);
            let lambdas: Vec<f64> = (1..=4).map(dirichlet_eigenvalue).collect();
            let modes = solver::eigenmodes(&p, &lambdas, &ts, &cfg)?;
            let columns = std::iter::once("t".to_string())
                .chain((1..=4).map(|n| format!("u_{n}")))
                .collect();
            let mut doc = Document::new(m, columns);
            doc.notes.push("eigenmodes u_n(t), λ_n = n²π², n = 1..4".into());
            for (k, &t) in ts.iter().enumerate() {
                let mut row: Vec<Cell> = vec![t.into()];
                row.extend(modes.iter().map(|m| Cell::from(m.values[k])));
                doc.push(row);
            }
            Ok(doc)
        }
        _ => Err(CliError::Validation(format!("figure {number} does not exist (use 1..6)"))),
    }
}

/// `w(x, t)` columns per `t`; for `α < 2` also `ln w`, which stays finite
/// where `w` itself underflows.
fn propagation_figure(
    settings: &Settings,
    manifest: crate::output::RunManifest,
    p: &MultiTermProblem,
    xs: &[f64],
) -> Result<Document, CliError> {
    let with_log = p.alpha() < 2.0;
    let mut columns = vec!["x".to_string()];
    columns.extend(TIMES.iter().map(|t| format!("w(t={t})")));
    if with_log {
        columns.extend(TIMES.iter().map(|t| format!("ln_w(t={t})")));
    }
    let mut doc = Document::new(manifest, columns);
    doc.notes.push("propagation function w(x,t) as a function of x".into());
    let fields = TIMES
        .iter()
        .map(|&t| evaluate_field(p, KernelKind::PropagationW, Slice::FixedT(t), xs, &settings.quadrature))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, &x) in xs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![x.into()];
        row.extend(fields.iter().map(|f| Cell::from(f.values[i])));
        if with_log {
            for &t in &TIMES {
                row.push(propagation_w_log(p, x, t, &settings.quadrature)?.ln_value.into());
            }
        }
        doc.push(row);
    }
    Ok(doc)
}

/// One `φ(t, ·)` column per (problem, t).
fn density_figure(
    settings: &Settings,
    manifest: crate::output::RunManifest,
    slices: Vec<(MultiTermProblem, f64)>,
    columns: Vec<String>,
    taus: &[f64],
) -> Result<Document, CliError> {
    let mut doc = Document::new(manifest, std::iter::once("tau".to_string()).chain(columns).collect());
    doc.notes.push("subordination density phi(t,tau) as a function of tau".into());
    let fields = slices
        .iter()
        .map(|(p, t)| evaluate_field(p, KernelKind::Phi, Slice::FixedT(*t), taus, &settings.quadrature))
        .collect::<Result<Vec<_>, _>>()?;
    for f in &fields {
        for a in &f.atoms {
            doc.notes.push(format!("atom: location = {:.16e}, weight = {:.16e}", a.location, a.weight));
        }
    }
    for (i, &tau) in taus.iter().enumerate() {
        let mut row: Vec<Cell> = vec![tau.into()];
        row.extend(fields.iter().map(|f| Cell::from(f.values[i])));
        doc.push(row);
    }
    Ok(doc)
}
