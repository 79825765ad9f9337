//! The TOML run configuration and the coordinate grids.

use std::path::Path;

use fracsub_core::problem::{validate_with, ProblemSpec};
use fracsub_core::solver::InitialProfile;
use fracsub_core::{MultiTermProblem, QuadratureConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Contents of a `--config` file. Every section is optional; command-line
/// flags override the file.
///
/// ```toml
/// schema_version = 1
///
/// [problem]
/// alpha = 1.9
/// c = 1.0
/// terms = [{ order = 1.5, coeff = 1.0 }]
///
/// [grids]
/// x = { min = 0.0, max = 3.0, points = 61 }
/// t = { values = [0.5, 1.0, 2.0] }
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub unsafe_allow_spread: bool,
    pub quadrature: Option<QuadratureConfig>,
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub grids: Grids,
    /// Kernel kind for `pdf` and `fundamental`.
    pub kind: Option<String>,
    pub initial: Option<InitialProfile>,
    /// Check or module name for `verify`.
    pub suite: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub profile_tol: f64,
    pub modes: Option<usize>,
    pub force_kernel_path: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = fracsub_core::solver::SolverConfig::default();
        SolverSection {
            profile_tol: d.profile_tol,
            modes: None,
            force_kernel_path: d.force_kernel_path,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub x: Option<Grid>,
    pub t: Option<Grid>,
    pub tau: Option<Grid>,
}

/// Either explicit `values` or `points` samples of `[min, max]`, linearly
/// or (with `log = true`) logarithmically spaced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub log: bool,
}

impl Grid {
    pub fn values(values: Vec<f64>) -> Self {
        Grid {
            values: Some(values),
            ..Default::default()
        }
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Grid {
            min: Some(min),
            max: Some(max),
            points: Some(points),
            ..Default::default()
        }
    }

    /// `points` cell midpoints of `[min, max]`, which keeps the samples off
    /// the ends and off round numbers.
    pub fn midpoints(min: f64, max: f64, points: usize) -> Self {
        let h = (max - min) / points as f64;
        Grid::values((0..points).map(|i| min + (i as f64 + 0.5) * h).collect())
    }

    /// Parses `a,b,c`, a single value, `min:max:points` or `log:min:max:points`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Validation(format!("cannot parse grid '{text}' (use a,b,c or min:max:points)"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [single] => Ok(Grid::values(single.split(',').map(num).collect::<Result<_, _>>()?)),
            [min, max, points] => Ok(Grid::linear(num(min)?, num(max)?, points.trim().parse().map_err(|_| bad())?)),
            ["log", min, max, points] => Ok(Grid {
                log: true,
                ..Grid::linear(num(min)?, num(max)?, points.trim().parse().map_err(|_| bad())?)
            }),
            _ => Err(bad()),
        }
    }

    pub fn resolve(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let bad = |why: &str| CliError::Validation(format!("grid {name}: {why}"));
        let samples = match (&self.values, self.min, self.max, self.points) {
            (Some(v), None, None, None) if !self.log => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if n == 0 || !(a.is_finite() && b.is_finite()) || (n > 1 && !(b > a)) {
                    return Err(bad("need finite min < max and points ≥ 1"));
                }
                if self.log && !(a > 0.0) {
                    return Err(bad("a log grid needs min > 0"));
                }
                let at = |i: usize| {
                    let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    if i + 1 == n {
                        b
                    } else if self.log {
                        (a.ln() + f * (b / a).ln()).exp()
                    } else {
                        a + f * (b - a)
                    }
                };
                (0..n).map(at).collect()
            }
            _ => return Err(bad("give either `values` or all of `min`, `max`, `points`")),
        };
        if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite and non-empty"));
        }
        if samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("values must be strictly increasing"));
        }
        Ok(samples)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "config schema_version {} is not supported (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }
}

/// Named parameter sets accepted by `--preset`.
pub fn preset(name: &str) -> Result<ProblemSpec, CliError> {
    let two = |alpha: f64, order: f64| ProblemSpec {
        alpha,
        c: 1.0,
        terms: vec![fracsub_core::Term::new(order, 1.0)],
    };
    Ok(match name {
        "classical-wave" => ProblemSpec {
            alpha: 2.0,
            c: 1.0,
            terms: Vec::new(),
        },
        "telegraph" => two(2.0, 1.0),
        _ => {
            return Err(CliError::Validation(format!(
                "unknown preset '{name}' (use telegraph or classical-wave)"
            )))
        }
    })
}

/// Parses `ORDER:COEFF` for `--term`.
pub fn parse_term(text: &str) -> Result<fracsub_core::Term, CliError> {
    let bad = || CliError::Validation(format!("cannot parse term '{text}' (use ORDER:COEFF)"));
    let (order, coeff) = text.split_once(':').ok_or_else(bad)?;
    Ok(fracsub_core::Term::new(
        order.trim().parse().map_err(|_| bad())?,
        coeff.trim().parse().map_err(|_| bad())?,
    ))
}

/// Parses `indicator:a:b`, `gaussian:center:width` or `sine:n` for `--initial`.
pub fn parse_initial(text: &str) -> Result<InitialProfile, CliError> {
    let bad = || {
        CliError::Validation(format!(
            "cannot parse initial data '{text}' (use indicator:a:b, gaussian:center:width or sine:n)"
        ))
    };
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let profile = match parts.as_slice() {
        ["indicator", a, b] => InitialProfile::Indicator { a: num(a)?, b: num(b)? },
        ["gaussian", c, w] => InitialProfile::Gaussian {
            center: num(c)?,
            width: num(w)?,
        },
        ["sine", n] => InitialProfile::SineMode {
            n: n.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    profile.validate()?;
    Ok(profile)
}

pub fn validate_problem(spec: &ProblemSpec, allow_spread: bool) -> Result<MultiTermProblem, CliError> {
    Ok(validate_with(spec, allow_spread)?)
}
