//! The multi-term problem and its Laplace-domain symbols.
//!
//! All kernels in this crate are functions of the symbol
//!
//! ```text
//! g(s) = c s^α + Σ_j c_j s^{α_j}
//! ```
//!
//! evaluated either on the positive imaginary axis `s = i r` (the real-axis
//! integral representations) or, for the Laplace-domain oracles, anywhere in
//! the cut plane `ℂ \ (−∞, 0]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("order out of range: {0}")]
    OrderOutOfRange(String),
    #[error("non-positive coefficient: {0}")]
    NonPositiveCoefficient(String),
    #[error("orders not strictly decreasing: {0}")]
    OrdersNotDecreasing(String),
    #[error("duplicate order {0} in the lower-order terms")]
    DuplicateOrder(f64),
    #[error("spread α − α_m = {spread} exceeds 1 (pass the unsafe spread override to experiment)")]
    SpreadTooLarge { spread: f64 },
    #[error("s = {0} lies on the branch cut (−∞, 0]")]
    DomainError(Complex64),
    #[error("the wavefront factorisation needs α = 2 (got α = {0})")]
    NotWaveLimit(f64),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Raw, unvalidated parameter tuple as it appears in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub alpha: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub terms: Vec<Term>,
}

fn one() -> f64 {
    1.0
}

/// One lower-order term `c_j D^{α_j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub order: f64,
    pub coeff: f64,
}

impl Term {
    pub fn new(order: f64, coeff: f64) -> Self {
        Term { order, coeff }
    }
}

/// The qualitative class of a problem, which decides how the kernels behave
/// near `x = t/√c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveClass {
    /// `α = 2, m = 0`: `w = H(t − √c x)`.
    ClassicalWave,
    /// `α = 2, m = 1, α_1 = 1`: finite speed with a jump at the front.
    Telegraph,
    /// `α = 2` with a non-integer lower order: finite speed, no front.
    FiniteSpeed,
    /// `α < 2`: `w(x,t) > 0` everywhere.
    InfiniteSpeed,
}

#[derive(Debug, Clone, Copy)]
struct PowerTerm {
    order: f64,
    coeff: f64,
    cos: f64,
    sin: f64,
}

impl PowerTerm {
    fn new(order: f64, coeff: f64) -> Self {
        let (sin, cos) = quarter_turn_sin_cos(order);
        PowerTerm {
            order,
            coeff,
            cos,
            sin,
        }
    }
}

/// A validated parameter set `(α, c, {(α_j, c_j)})`.
///
/// Values are immutable after construction; every method is a pure function.
#[derive(Debug, Clone)]
pub struct MultiTermProblem {
    alpha: f64,
    c: f64,
    terms: Vec<Term>,
    spread_override: bool,
    // leading term first, then the lower-order terms in descending order
    powers: Vec<PowerTerm>,
}

impl PartialEq for MultiTermProblem {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.c == other.c && self.terms == other.terms
    }
}

impl Serialize for MultiTermProblem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.spec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiTermProblem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let spec = ProblemSpec::deserialize(deserializer)?;
        validate(&spec).map_err(serde::de::Error::custom)
    }
}

/// Validates a raw parameter tuple against `1 < α ≤ 2`, `α > α_1 > … > α_m > 0`,
/// `α − α_m ≤ 1`, `c, c_j > 0`.
pub fn validate(spec: &ProblemSpec) -> Result<MultiTermProblem, ProblemError> {
    validate_with(spec, false)
}

/// Like [`validate`], but `allow_spread = true` skips the `α − α_m ≤ 1` check.
/// None of the positivity guarantees hold for a problem accepted that way.
pub fn validate_with(spec: &ProblemSpec, allow_spread: bool) -> Result<MultiTermProblem, ProblemError> {
    let alpha = spec.alpha;
    if !(alpha.is_finite() && alpha > 1.0 && alpha <= 2.0) {
        return Err(ProblemError::OrderOutOfRange(format!(
            "leading order α = {alpha} is not in (1, 2]"
        )));
    }
    if !(spec.c.is_finite() && spec.c > 0.0) {
        return Err(ProblemError::NonPositiveCoefficient(format!("c = {}", spec.c)));
    }
    let mut previous = alpha;
    for (j, term) in spec.terms.iter().enumerate() {
        if !(term.order.is_finite() && term.order > 0.0) {
            return Err(ProblemError::OrderOutOfRange(format!(
                "α_{} = {} is not positive",
                j + 1,
                term.order
            )));
        }
        if !(term.coeff.is_finite() && term.coeff > 0.0) {
            return Err(ProblemError::NonPositiveCoefficient(format!(
                "c_{} = {}",
                j + 1,
                term.coeff
            )));
        }
        if term.order == previous {
            return Err(ProblemError::DuplicateOrder(term.order));
        }
        if term.order > previous {
            return Err(ProblemError::OrdersNotDecreasing(format!(
                "α_{} = {} follows {}",
                j + 1,
                term.order,
                previous
            )));
        }
        previous = term.order;
    }
    let spread = alpha - previous;
    if spread > 1.0 && !allow_spread {
        return Err(ProblemError::SpreadTooLarge { spread });
    }
    let mut powers = vec![PowerTerm::new(alpha, spec.c)];
    powers.extend(spec.terms.iter().map(|t| PowerTerm::new(t.order, t.coeff)));
    Ok(MultiTermProblem {
        alpha,
        c: spec.c,
        terms: spec.terms.clone(),
        spread_override: allow_spread && spread > 1.0,
        powers,
    })
}

/// Symbols on the imaginary axis at frequency `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolEval {
    pub r: f64,
    /// `A(r) = Re g(ir)`
    pub a: f64,
    /// `B(r) = Im g(ir)`
    pub b: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

impl SymbolEval {
    /// `K⁺ + i K⁻ = √g(ir)`.
    pub fn root(&self) -> Complex64 {
        Complex64::new(self.k_plus, self.k_minus)
    }
}

impl MultiTermProblem {
    /// Convenience constructor; panics are avoided by returning the validation error.
    pub fn new(alpha: f64, c: f64, terms: &[(f64, f64)]) -> Result<Self, ProblemError> {
        validate(&ProblemSpec {
            alpha,
            c,
            terms: terms.iter().map(|&(o, k)| Term::new(o, k)).collect(),
        })
    }

    /// `α = 2, m = 0, c = 1`.
    pub fn classical_wave() -> Self {
        Self::new(2.0, 1.0, &[]).expect("valid")
    }

    /// `α = 2, α_1 = 1, c = c_1 = 1`.
    pub fn telegraph() -> Self {
        Self::new(2.0, 1.0, &[(1.0, 1.0)]).expect("valid")
    }

    /// Two-term problem with unit coefficients.
    pub fn two_term(alpha: f64, alpha1: f64) -> Result<Self, ProblemError> {
        Self::new(alpha, 1.0, &[(alpha1, 1.0)])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of lower-order terms `m`.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    /// Smallest order `α_m` (or `α` when `m = 0`).
    pub fn min_order(&self) -> f64 {
        self.terms.last().map_or(self.alpha, |t| t.order)
    }

    /// True when the problem was accepted with `α − α_m > 1`.
    pub fn spread_overridden(&self) -> bool {
        self.spread_override
    }

    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            alpha: self.alpha,
            c: self.c,
            terms: self.terms.clone(),
        }
    }

    pub fn wave_class(&self) -> WaveClass {
        if self.alpha < 2.0 {
            WaveClass::InfiniteSpeed
        } else if self.terms.is_empty() {
            WaveClass::ClassicalWave
        } else if self.terms.len() == 1 && self.terms[0].order == 1.0 {
            WaveClass::Telegraph
        } else {
            WaveClass::FiniteSpeed
        }
    }

    /// Propagation speed `1/√c` when `α = 2`.
    pub fn wave_speed(&self) -> Option<f64> {
        (self.alpha == 2.0).then(|| 1.0 / self.c.sqrt())
    }

    /// `lim_{s→∞} h(s)` for the two problems with a jump at the front:
    /// `0` for the classical wave and `c_1/(2√c)` for the telegraph equation.
    pub fn front_decay_rate(&self) -> Option<f64> {
        match self.wave_class() {
            WaveClass::ClassicalWave => Some(0.0),
            WaveClass::Telegraph => Some(self.terms[0].coeff / (2.0 * self.c.sqrt())),
            _ => None,
        }
    }

    /// `g(1) = c + Σ c_j`.
    pub fn symbol_at_one(&self) -> f64 {
        self.powers.iter().map(|p| p.coeff).sum()
    }

    /// `g(s)` on the principal branch.
    pub fn g_eval(&self, s: Complex64) -> Result<Complex64, ProblemError> {
        check_cut(s)?;
        Ok(self.powers.iter().map(|p| p.coeff * s.powf(p.order)).sum())
    }

    /// `g(s)^power`, analytically continued to the whole cut plane.
    ///
    /// Factoring `g(s) = s^{α_m} f(s)` keeps every exponent of `f` in `[0, 1]`,
    /// so `|arg f(s)| ≤ |arg s| < π` and the principal power of `f` is the
    /// analytic continuation. A naive `g(s).powf(p)` would jump once
    /// `arg g(s)` wraps past `π` for `|arg s| > π/α`.
    pub fn g_pow(&self, s: Complex64, power: f64) -> Result<Complex64, ProblemError> {
        check_cut(s)?;
        let base = self.min_order();
        let f: Complex64 = self
            .powers
            .iter()
            .map(|p| {
                if p.order == base {
                    Complex64::new(p.coeff, 0.0)
                } else {
                    p.coeff * s.powf(p.order - base)
                }
            })
            .sum();
        Ok(s.powf(power * base) * f.powf(power))
    }

    /// `√g(s)` on the cut plane.
    pub fn sqrt_g(&self, s: Complex64) -> Result<Complex64, ProblemError> {
        self.g_pow(s, 0.5)
    }

    /// `g'(s)`.
    pub fn g_derivative(&self, s: Complex64) -> Result<Complex64, ProblemError> {
        check_cut(s)?;
        Ok(self
            .powers
            .iter()
            .map(|p| p.coeff * p.order * s.powf(p.order - 1.0))
            .sum())
    }

    /// `(A(r), B(r)) = (Re g(ir), Im g(ir))` from the explicit cosine and sine sums.
    pub fn ab_eval(&self, r: f64) -> (f64, f64) {
        debug_assert!(r > 0.0);
        let lr = r.ln();
        self.powers.iter().fold((0.0, 0.0), |(a, b), p| {
            let w = p.coeff * (p.order * lr).exp();
            (a + w * p.cos, b + w * p.sin)
        })
    }

    /// `K±(r) = 2^{-1/2} ((A² + B²)^{1/2} ± A)^{1/2}`.
    ///
    /// `B ≥ 0` puts `g(ir)` in the closed upper half plane, so `√g(ir)` is the
    /// half-angle root with `θ = atan2(B, A) ∈ [0, π]` and no branch tracking
    /// is needed. The smaller of the two is recovered from `2 K⁺ K⁻ = B` to
    /// avoid cancellation in `ρ − |A|`.
    pub fn k_eval(&self, r: f64) -> SymbolEval {
        let (a, b) = self.ab_eval(r);
        let rho = a.hypot(b);
        let (k_plus, k_minus) = if a >= 0.0 {
            let kp = (0.5 * (rho + a)).sqrt();
            (kp, if kp > 0.0 { 0.5 * b / kp } else { 0.0 })
        } else {
            let km = (0.5 * (rho - a)).sqrt();
            (if km > 0.0 { 0.5 * b / km } else { 0.0 }, km)
        };
        SymbolEval {
            r,
            a,
            b,
            k_plus,
            k_minus,
        }
    }

    /// `(Re, Im)` of `g(ir)^power` from the polar form `ρ^p (cos pθ, sin pθ)`.
    ///
    /// `power = 1/2` returns [`Self::k_eval`]'s pair; `power = 1/α` gives the
    /// symbol of the density subordinating to the single-term problem. The
    /// real part is non-negative for every `power ≤ 1/α`.
    pub fn root_symbol(&self, r: f64, power: f64) -> Result<(f64, f64), ProblemError> {
        if !(r > 0.0) {
            return Err(ProblemError::InvalidArgument(format!("r = {r} must be positive")));
        }
        if !(power > 0.0 && power <= 1.0) {
            return Err(ProblemError::InvalidArgument(format!(
                "power = {power} is not in (0, 1]"
            )));
        }
        if power == 0.5 {
            let k = self.k_eval(r);
            return Ok((k.k_plus, k.k_minus));
        }
        Ok(self.polar_root(r, power))
    }

    pub(crate) fn polar_root(&self, r: f64, power: f64) -> (f64, f64) {
        let (a, b) = self.ab_eval(r);
        // every term has argument in [0, απ/2], hence so does g(ir)
        let theta = b.atan2(a).clamp(0.0, self.alpha * PI / 2.0);
        let modulus = a.hypot(b).powf(power);
        let mut angle = theta * power;
        if power * self.alpha <= 1.0 {
            angle = angle.min(PI / 2.0);
        }
        let (s, c) = angle.sin_cos();
        (modulus * c, modulus * s)
    }

    /// `h(s) = √g(s) − √c s`, the symbol left after removing the pure delay
    /// `exp(−x√c s)` from `ŵ` when `α = 2`.
    pub fn wavefront_symbol(&self, s: Complex64) -> Result<Complex64, ProblemError> {
        if self.alpha != 2.0 {
            return Err(ProblemError::NotWaveLimit(self.alpha));
        }
        let root = self.sqrt_g(s)?;
        Ok(self.front_excess(s, root))
    }

    /// `√g − √c s` in the cancellation-free form `Σ c_j s^{α_j} / (√g + √c s)`.
    pub(crate) fn front_excess(&self, s: Complex64, root: Complex64) -> Complex64 {
        let lower: Complex64 = self.powers[1..].iter().map(|p| p.coeff * s.powf(p.order)).sum();
        if lower == Complex64::new(0.0, 0.0) {
            return lower;
        }
        lower / (root + self.c.sqrt() * s)
    }

    /// Half-angle `θ₀ = (2 − α)π/(2α) − ε` of the sector in which `φ(·, τ)`
    /// extends analytically.
    pub fn analyticity_angle(&self, eps: f64) -> Result<f64, ProblemError> {
        if self.alpha == 2.0 {
            return Err(ProblemError::NotApplicable(
                "α = 2: no analytic extension (finite propagation speed)".into(),
            ));
        }
        let full = (2.0 - self.alpha) * PI / (2.0 * self.alpha);
        if !(eps >= 0.0 && eps < full) {
            return Err(ProblemError::InvalidArgument(format!(
                "ε = {eps} must lie in [0, {full})"
            )));
        }
        Ok(full - eps)
    }
}

// sin and cos of order·π/2, exact when the order is an integer
fn quarter_turn_sin_cos(order: f64) -> (f64, f64) {
    if order.fract() == 0.0 {
        match (order as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        (order * PI / 2.0).sin_cos()
    }
}

fn check_cut(s: Complex64) -> Result<(), ProblemError> {
    if !(s.re.is_finite() && s.im.is_finite()) || (s.im == 0.0 && s.re <= 0.0) {
        return Err(ProblemError::DomainError(s));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(alpha: f64, terms: &[(f64, f64)]) -> ProblemSpec {
        ProblemSpec {
            alpha,
            c: 1.0,
            terms: terms.iter().map(|&(o, c)| Term::new(o, c)).collect(),
        }
    }

    #[test]
    fn validation_accepts_and_rejects() {
        assert!(validate(&spec(1.5, &[(1.0, 1.0)])).is_ok());
        assert!(matches!(
            validate(&spec(2.1, &[])),
            Err(ProblemError::OrderOutOfRange(_))
        ));
        assert!(matches!(
            validate(&spec(1.0, &[])),
            Err(ProblemError::OrderOutOfRange(_))
        ));
        assert!(matches!(
            validate(&spec(1.9, &[(0.4, 1.0)])),
            Err(ProblemError::SpreadTooLarge { .. })
        ));
        assert!(validate_with(&spec(1.9, &[(0.4, 1.0)]), true)
            .unwrap()
            .spread_overridden());
        assert!(matches!(
            validate(&spec(1.9, &[(1.2, 1.0), (1.5, 1.0)])),
            Err(ProblemError::OrdersNotDecreasing(_))
        ));
        assert!(matches!(
            validate(&spec(1.9, &[(1.2, 1.0), (1.2, 2.0)])),
            Err(ProblemError::DuplicateOrder(_))
        ));
        assert!(matches!(
            validate(&spec(1.9, &[(1.9, 1.0)])),
            Err(ProblemError::DuplicateOrder(_))
        ));
        assert!(matches!(
            validate(&spec(1.9, &[(1.2, 0.0)])),
            Err(ProblemError::NonPositiveCoefficient(_))
        ));
        assert!(matches!(
            validate(&spec(1.9, &[(-0.2, 1.0)])),
            Err(ProblemError::OrderOutOfRange(_))
        ));
        let mut bad_c = spec(1.5, &[]);
        bad_c.c = -1.0;
        assert!(matches!(
            validate(&bad_c),
            Err(ProblemError::NonPositiveCoefficient(_))
        ));
        // α − α_m = 1 exactly is allowed
        assert!(validate(&spec(2.0, &[(1.0, 1.0)])).is_ok());
    }

    #[test]
    fn wave_classes() {
        assert_eq!(MultiTermProblem::classical_wave().wave_class(), WaveClass::ClassicalWave);
        assert_eq!(MultiTermProblem::telegraph().wave_class(), WaveClass::Telegraph);
        assert_eq!(
            MultiTermProblem::two_term(2.0, 1.5).unwrap().wave_class(),
            WaveClass::FiniteSpeed
        );
        assert_eq!(
            MultiTermProblem::two_term(1.5, 1.0).unwrap().wave_class(),
            WaveClass::InfiniteSpeed
        );
        let p = MultiTermProblem::new(2.0, 4.0, &[(1.0, 3.0)]).unwrap();
        assert_eq!(p.front_decay_rate(), Some(0.75));
        assert_eq!(p.wave_speed(), Some(0.5));
    }

    #[test]
    fn g_eval_examples() {
        let wave = MultiTermProblem::classical_wave();
        let v = wave.g_eval(Complex64::new(2.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 4.0, epsilon = 1e-14);
        assert!(v.im.abs() < 1e-14);

        let tel = MultiTermProblem::telegraph();
        let v = tel.g_eval(Complex64::new(0.0, 1.0)).unwrap();
        assert!((v - Complex64::new(-1.0, 1.0)).norm() < 1e-15);

        let single = MultiTermProblem::new(1.5, 1.0, &[]).unwrap();
        let v = single.g_eval(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-15);

        assert!(matches!(
            tel.g_eval(Complex64::new(-1.0, 0.0)),
            Err(ProblemError::DomainError(_))
        ));
        assert!(tel.g_eval(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn ab_eval_examples() {
        let (a, b) = MultiTermProblem::telegraph().ab_eval(1.0);
        assert_relative_eq!(a, -1.0, epsilon = 1e-15);
        assert_relative_eq!(b, 1.0, epsilon = 1e-15);
        let (a, b) = MultiTermProblem::classical_wave().ab_eval(3.0);
        assert_relative_eq!(a, -9.0, epsilon = 1e-14);
        assert!(b.abs() < 1e-14);
        let (a, b) = MultiTermProblem::new(1.5, 1.0, &[]).unwrap().ab_eval(1.0);
        assert_relative_eq!(a, -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(b, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn k_eval_examples() {
        // K± = ((√2 ∓ 1)/2)^{1/2} for A = −1, B = 1
        let k = MultiTermProblem::telegraph().k_eval(1.0);
        let kp = ((2f64.sqrt() - 1.0) / 2.0).sqrt();
        let km = ((2f64.sqrt() + 1.0) / 2.0).sqrt();
        assert_relative_eq!(k.k_plus, kp, epsilon = 1e-15);
        assert_relative_eq!(k.k_minus, km, epsilon = 1e-15);
        assert_relative_eq!(k.k_plus, 0.455090, epsilon = 1e-6);
        assert_relative_eq!(k.k_minus, 1.098684, epsilon = 1e-6);
        assert_relative_eq!(k.k_plus * k.k_minus, 0.5, epsilon = 1e-15);

        let k = MultiTermProblem::classical_wave().k_eval(1.0);
        assert_eq!(k.k_plus, 0.0);
        assert_eq!(k.k_minus, 1.0);
    }

    fn loglog_slope(p: &MultiTermProblem, r0: f64, r1: f64, plus: bool) -> f64 {
        let pick = |r: f64| {
            let k = p.k_eval(r);
            if plus {
                k.k_plus
            } else {
                k.k_minus
            }
        };
        (pick(r1) / pick(r0)).ln() / (r1 / r0).ln()
    }

    #[test]
    fn k_asymptotic_slopes() {
        let p = MultiTermProblem::two_term(1.8, 1.2).unwrap();
        for plus in [true, false] {
            assert!((loglog_slope(&p, 1e3, 1e5, plus) - 0.9).abs() < 0.02);
            assert!((loglog_slope(&p, 1e6, 1e8, plus) - 0.9).abs() < 0.02);
            assert!((loglog_slope(&p, 1e-8, 1e-6, plus) - 0.6).abs() < 0.02);
        }
    }

    #[test]
    fn root_symbol_examples() {
        let tel = MultiTermProblem::telegraph();
        let k = tel.k_eval(1.0);
        assert_eq!(tel.root_symbol(1.0, 0.5).unwrap(), (k.k_plus, k.k_minus));
        let (lp, lm) = tel.polar_root(1.0, 0.5);
        assert!((lp - 0.455090).abs() < 1e-6 && (lm - 1.098684).abs() < 1e-6);

        let single = MultiTermProblem::new(1.5, 1.0, &[]).unwrap();
        let (lp, lm) = single.root_symbol(1.0, 1.0 / 1.5).unwrap();
        assert!(lp.abs() < 1e-15);
        assert_relative_eq!(lm, 1.0, epsilon = 1e-15);
        assert!(single.root_symbol(1.0, 0.0).is_err());
        assert!(single.root_symbol(-1.0, 0.5).is_err());
    }

    #[test]
    fn wavefront_symbol_examples() {
        let wave = MultiTermProblem::classical_wave();
        for s in [Complex64::new(0.3, 0.0), Complex64::new(1.0, 5.0), Complex64::new(0.0, 2.0)] {
            assert_eq!(wave.wavefront_symbol(s).unwrap().norm(), 0.0);
        }
        let tel = MultiTermProblem::telegraph();
        let h = tel.wavefront_symbol(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(h.re, 2f64.sqrt() - 1.0, epsilon = 1e-15);
        let h = tel.wavefront_symbol(Complex64::new(1e6, 0.0)).unwrap();
        // √(s² + s) − s = 1/2 − 1/(8s) + …
        assert!((h.re - 0.5).abs() < 1e-6);
        assert!(matches!(
            MultiTermProblem::two_term(1.9, 1.0).unwrap().wavefront_symbol(Complex64::new(1.0, 0.0)),
            Err(ProblemError::NotWaveLimit(_))
        ));
    }

    #[test]
    fn analyticity_angle_examples() {
        let p = MultiTermProblem::new(1.5, 1.0, &[]).unwrap();
        assert_relative_eq!(p.analyticity_angle(0.0).unwrap(), PI / 6.0, epsilon = 1e-15);
        let p = MultiTermProblem::new(1.25, 1.0, &[]).unwrap();
        assert_relative_eq!(p.analyticity_angle(0.01).unwrap(), 0.3 * PI - 0.01, epsilon = 1e-15);
        assert!(matches!(
            MultiTermProblem::telegraph().analyticity_angle(0.01),
            Err(ProblemError::NotApplicable(_))
        ));
        assert!(p.analyticity_angle(2.0).is_err());
    }

    #[test]
    fn continuation_matches_principal_root_near_positive_axis() {
        let p = MultiTermProblem::new(1.9, 1.0, &[(1.2, 0.5), (0.95, 2.0)]).unwrap();
        for s in [Complex64::new(0.7, 0.2), Complex64::new(3.0, -1.0), Complex64::new(0.0, 2.0)] {
            let direct = p.g_eval(s).unwrap().sqrt();
            let cont = p.sqrt_g(s).unwrap();
            assert!((direct - cont).norm() < 1e-13 * direct.norm());
        }
        // Continuation stays in the right half plane even where arg g(s) > π.
        let s = Complex64::from_polar(2.0, 0.95 * PI);
        assert!(p.g_eval(s).unwrap().arg().abs() < PI);
        let root = p.sqrt_g(s).unwrap();
        assert!(root.arg().abs() <= 0.95 * PI * 1.9 / 2.0 + 1e-12);
    }

    fn arb_problem() -> impl Strategy<Value = MultiTermProblem> {
        (1.01f64..=2.0, 0.1f64..5.0, proptest::collection::vec((0.05f64..1.0, 0.1f64..5.0), 0..4))
            .prop_filter_map("valid", |(alpha, c, raw)| {
                // orders as decreasing fractions of the allowed window [α − 1, α)
                let lo = (alpha - 1.0).max(0.0);
                let mut orders: Vec<f64> = raw.iter().map(|(u, _)| lo + u * (alpha - lo)).collect();
                orders.sort_by(|a, b| b.partial_cmp(a).unwrap());
                orders.dedup();
                let terms: Vec<(f64, f64)> =
                    orders.iter().zip(raw.iter()).map(|(&o, &(_, k))| (o, k)).collect();
                MultiTermProblem::new(alpha, c, &terms).ok()
            })
    }

    proptest! {
        #[test]
        fn k_squares_to_g(p in arb_problem(), lr in -8.0f64..8.0) {
            let r = 10f64.powf(lr);
            let k = p.k_eval(r);
            let sq = k.root() * k.root();
            let g = Complex64::new(k.a, k.b);
            prop_assert!((sq - g).norm() <= 1e-12 * g.norm());
            prop_assert!(k.b >= 0.0);
            prop_assert!(k.k_plus >= 0.0 && k.k_minus >= 0.0);
            if p.m() >= 1 || p.alpha() < 2.0 {
                prop_assert!(k.k_plus > 0.0 && k.k_minus > 0.0);
            }
            let via_g = p.g_eval(Complex64::new(0.0, r)).unwrap();
            prop_assert!((via_g - g).norm() <= 1e-12 * g.norm());
            let (lp, lm) = p.root_symbol(r, 0.5).unwrap();
            prop_assert!((lp - k.k_plus).abs() <= 1e-14 * k.root().norm());
            prop_assert!((lm - k.k_minus).abs() <= 1e-14 * k.root().norm());
            let (pp, pm) = p.polar_root(r, 0.5);
            prop_assert!((pp - k.k_plus).abs() <= 1e-13 * k.root().norm());
            prop_assert!((pm - k.k_minus).abs() <= 1e-13 * k.root().norm());
            let (l_plus, _) = p.root_symbol(r, 1.0 / p.alpha()).unwrap();
            prop_assert!(l_plus >= -1e-15);
        }
    }
}
