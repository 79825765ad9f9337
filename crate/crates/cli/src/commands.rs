//! Table-producing commands.

use fracsub_core::kernels::{evaluate_field, KernelField, Slice};
use fracsub_core::solver::{self, dirichlet_eigenvalue, InitialProfile, LineProblem};
use fracsub_core::{KernelKind, MultiTermProblem};

use crate::config::{parse_initial, Grid};
use crate::output::{Cell, CommandName, Document};
use crate::{CliError, Settings};

/// `t ∈ {0.25, 0.5, 1, 2}`.
pub fn default_times() -> Grid {
    Grid::values(vec![0.25, 0.5, 1.0, 2.0])
}

fn kind_for(name: &Option<String>, fallback: KernelKind, allowed: &[KernelKind]) -> Result<KernelKind, CliError> {
    let kind = match name {
        Some(n) => KernelKind::parse(n).ok_or_else(|| CliError::Validation(format!("unknown kernel kind '{n}'")))?,
        None => fallback,
    };
    if !allowed.contains(&kind) {
        let names: Vec<&str> = allowed.iter().map(|k| k.name()).collect();
        return Err(CliError::Validation(format!(
            "kind '{}' is not available here (use {})",
            kind.name(),
            names.join(" or ")
        )));
    }
    Ok(kind)
}

fn atom_notes(field: &KernelField, fixed_name: &str, fixed: f64) -> Vec<String> {
    field
        .atoms
        .iter()
        .map(|a| {
            format!(
                "atom of {} at {fixed_name} = {fixed:.16e}: location = {:.16e}, weight = {:.16e}",
                field.kind.name(),
                a.location,
                a.weight
            )
        })
        .collect()
}

/// Rows `outer, inner, value, error_estimate, converged` over one kernel
/// slice per outer value.
fn kernel_table(
    doc: &mut Document,
    p: &MultiTermProblem,
    kind: KernelKind,
    settings: &Settings,
    outer: (&str, &[f64]),
    inner: &[f64],
    slice: impl Fn(f64) -> Slice,
) -> Result<(), CliError> {
    for &o in outer.1 {
        let field = evaluate_field(p, kind, slice(o), inner, &settings.quadrature)?;
        doc.notes.extend(atom_notes(&field, outer.0, o));
        for (i, &g) in field.grid.iter().enumerate() {
            doc.push(vec![
                o.into(),
                g.into(),
                field.values[i].into(),
                field.error_estimates[i].into(),
                field.converged[i].into(),
            ]);
        }
    }
    Ok(())
}

fn kernel_columns(outer: &str, inner: &str, value: &str) -> Vec<String> {
    vec![
        outer.into(),
        inner.into(),
        value.into(),
        "error_estimate".into(),
        "converged".into(),
    ]
}

pub fn propagation(settings: &Settings, x: &Option<String>, t: &Option<String>) -> Result<Document, CliError> {
    let p = settings.problem()?;
    let xg = settings.grid(x, "x", Grid::midpoints(0.0, 3.0, 60))?;
    let tg = settings.grid(t, "t", default_times())?;
    let (xs, ts) = (xg.resolve("x")?, tg.resolve("t")?);
    let mut m = settings.manifest(CommandName::Propagation);
    m.grids.insert("x".into(), xg);
    m.grids.insert("t".into(), tg);
    let mut doc = Document::new(m, kernel_columns("t", "x", "w"));
    kernel_table(&mut doc, &p, KernelKind::PropagationW, settings, ("t", &ts), &xs, Slice::FixedT)?;
    Ok(doc)
}

pub fn pdf(
    settings: &Settings,
    kind: &Option<String>,
    t: &Option<String>,
    tau: &Option<String>,
) -> Result<Document, CliError> {
    let p = settings.problem()?;
    let kind = kind_for(
        &kind.clone().or_else(|| settings.config.kind.clone()),
        KernelKind::Phi,
        &[KernelKind::Phi, KernelKind::Psi],
    )?;
    let tg = settings.grid(t, "t", default_times())?;
    let taug = settings.grid(tau, "tau", Grid::midpoints(0.0, 4.0, 80))?;
    let (ts, taus) = (tg.resolve("t")?, taug.resolve("tau")?);
    let mut m = settings.manifest(CommandName::Pdf);
    m.parameters.insert("kind".into(), kind.name().into());
    m.grids.insert("t".into(), tg);
    m.grids.insert("tau".into(), taug);
    let mut doc = Document::new(m, kernel_columns("t", "tau", kind.name()));
    kernel_table(&mut doc, &p, kind, settings, ("t", &ts), &taus, Slice::FixedT)?;
    Ok(doc)
}

pub fn fundamental(
    settings: &Settings,
    kind: &Option<String>,
    x: &Option<String>,
    t: &Option<String>,
) -> Result<Document, CliError> {
    let p = settings.problem()?;
    let kind = kind_for(
        &kind.clone().or_else(|| settings.config.kind.clone()),
        KernelKind::Gc,
        &[KernelKind::Gc, KernelKind::Gs],
    )?;
    let mut m = settings.manifest(CommandName::Fundamental);
    m.parameters.insert("kind".into(), kind.name().into());
    if kind == KernelKind::Gc {
        let xg = settings.grid(x, "x", Grid::midpoints(-3.0, 3.0, 120))?;
        let tg = settings.grid(t, "t", default_times())?;
        let (xs, ts) = (xg.resolve("x")?, tg.resolve("t")?);
        m.grids.insert("x".into(), xg);
        m.grids.insert("t".into(), tg);
        let mut doc = Document::new(m, kernel_columns("t", "x", kind.name()));
        kernel_table(&mut doc, &p, kind, settings, ("t", &ts), &xs, Slice::FixedT)?;
        Ok(doc)
    } else {
        let xg = settings.grid(x, "x", Grid::values(vec![0.5, 1.0, 2.0]))?;
        let tg = settings.grid(t, "t", Grid::midpoints(0.0, 5.0, 100))?;
        let (xs, ts) = (xg.resolve("x")?, tg.resolve("t")?);
        if xs.iter().any(|&v| !(v > 0.0)) {
            return Err(CliError::Validation("G_s needs x > 0".into()));
        }
        m.grids.insert("x".into(), xg);
        m.grids.insert("t".into(), tg);
        let mut doc = Document::new(m, kernel_columns("x", "t", kind.name()));
        kernel_table(&mut doc, &p, kind, settings, ("x", &xs), &ts, Slice::FixedSpace)?;
        Ok(doc)
    }
}

pub fn eigenmodes(settings: &Settings, t: &Option<String>) -> Result<Document, CliError> {
    let p = settings.problem()?;
    let cfg = settings.solver_config(4);
    let tg = settings.grid(t, "t", Grid::linear(0.0, 10.0, 101))?;
    let ts = tg.resolve("t")?;
    let lambdas: Vec<f64> = (1..=cfg.modes).map(dirichlet_eigenvalue).collect();
    let modes = solver::eigenmodes(&p, &lambdas, &ts, &cfg)?;
    let mut m = settings.manifest(CommandName::Eigenmodes);
    m.parameters.insert("modes".into(), cfg.modes.to_string());
    m.grids.insert("t".into(), tg);
    let columns = std::iter::once("t".to_string())
        .chain((1..=cfg.modes).map(|n| format!("u_{n}")))
        .collect();
    let mut doc = Document::new(m, columns);
    doc.notes.push("eigenvalues λ_n = n²π² of −d²/dx² on (0,1) with Dirichlet conditions".into());
    if modes.first().is_some_and(|m| m.closed_form) {
        doc.notes.push("closed-form damped-cosine modes (classical wave or telegraph equation)".into());
    }
    for (k, &t) in ts.iter().enumerate() {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend(modes.iter().map(|m| Cell::from(m.values[k])));
        doc.push(row);
    }
    Ok(doc)
}

fn initial_data(settings: &Settings, flag: &Option<String>, default: InitialProfile) -> Result<InitialProfile, CliError> {
    let v = match flag {
        Some(text) => parse_initial(text)?,
        None => settings.config.initial.unwrap_or(default),
    };
    v.validate()?;
    Ok(v)
}

fn field_rows(doc: &mut Document, field: &solver::SolutionField) {
    for (k, &t) in field.t_grid.iter().enumerate() {
        for (i, &x) in field.x_grid.iter().enumerate() {
            doc.push(vec![t.into(), x.into(), field.values[k][i].into()]);
        }
    }
}

pub fn solve_line(
    settings: &Settings,
    initial: &Option<String>,
    x: &Option<String>,
    t: &Option<String>,
) -> Result<Document, CliError> {
    let p = settings.problem()?;
    let v = initial_data(settings, initial, InitialProfile::Indicator { a: -1.0, b: 1.0 })?;
    let xg = settings.grid(x, "x", Grid::linear(-3.0, 3.0, 61))?;
    let tg = settings.grid(t, "t", Grid::values(vec![0.5, 1.0, 2.0]))?;
    let lp = LineProblem {
        initial: v,
        x_grid: xg.resolve("x")?,
        t_grid: tg.resolve("t")?,
    };
    let field = solver::solve_line(&p, &lp, &settings.solver_config(64))?;
    let mut m = settings.manifest(CommandName::SolveLine);
    m.parameters.insert("initial".into(), format!("{v:?}"));
    m.grids.insert("x".into(), xg);
    m.grids.insert("t".into(), tg);
    let mut doc = Document::new(m, vec!["t".into(), "x".into(), "u".into()]);
    field_rows(&mut doc, &field);
    Ok(doc)
}

pub fn solve_interval(
    settings: &Settings,
    initial: &Option<String>,
    x: &Option<String>,
    t: &Option<String>,
) -> Result<Document, CliError> {
    let p = settings.problem()?;
    let v = initial_data(settings, initial, InitialProfile::Indicator { a: 0.2, b: 0.6 })?;
    let cfg = settings.solver_config(64);
    let xg = settings.grid(x, "x", Grid::linear(0.0, 1.0, 51))?;
    let tg = settings.grid(t, "t", Grid::values(vec![0.0, 0.5, 1.0, 2.0]))?;
    let (xs, ts) = (xg.resolve("x")?, tg.resolve("t")?);
    let (field, expansion) = solver::solve_interval(&p, &v, cfg.modes, &xs, &ts, &cfg)?;
    let mut m = settings.manifest(CommandName::SolveInterval);
    m.parameters.insert("initial".into(), format!("{v:?}"));
    m.parameters.insert("modes".into(), cfg.modes.to_string());
    m.grids.insert("x".into(), xg);
    m.grids.insert("t".into(), tg);
    let mut doc = Document::new(m, vec!["t".into(), "x".into(), "u".into()]);
    doc.notes.push(format!(
        "truncation: {} modes, Σ_{{n>N}} v_n² = {:.16e}",
        expansion.n_modes, expansion.tail_estimate
    ));
    field_rows(&mut doc, &field);
    Ok(doc)
}
