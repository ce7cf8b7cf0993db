//! Evaluators for the q-exponentials `e_q`, `E_q` and the improved `𝓔_q`.
//!
//! Each function has a power-series evaluator (valid in a disc around the
//! origin) and an infinite-product evaluator (valid off a discrete pole set).
//! Series are accumulated in double-double precision so that cancellation
//! between large terms does not eat the result; products run in plain `f64`
//! because every factor is close to 1.
//!
//! Parameters `q > 1` are reduced to `1/q` before any product is formed,
//! using `E_q = e_{1/q}` and `𝓔_q = 𝓔_{1/q}`, so factors always approach 1
//! geometrically.

use std::fmt;

use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{QError, Result};
use crate::param::{QParam, Regime};

/// Below this magnitude a factor denominator `1 - w` is treated as
/// vanishing (scaled by `1 + |w|`).
pub const POLE_THRESHOLD: f64 = 1e-14;
/// Below this magnitude a result counts as converged regardless of the
/// relative criterion.
pub const ABSOLUTE_FLOOR: f64 = 1e-300;
/// `Method::Auto` uses the series strictly inside this fraction of its
/// radius of convergence.
pub const AUTO_SERIES_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Series,
    Product,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Series => "series",
            Method::Product => "product",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "series" => Ok(Method::Series),
            "product" => Ok(Method::Product),
            other => Err(QError::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Truncation and method settings shared by all evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Relative truncation tolerance.
    pub rel_tol: f64,
    /// Maximum number of series terms.
    pub max_terms: usize,
    /// Maximum number of product factors.
    pub max_factors: usize,
    pub method: Method,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 512,
            max_factors: 2048,
            method: Method::Auto,
        }
    }
}

impl EvalConfig {
    pub fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(QError::InvalidConfig(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_terms == 0 || self.max_factors == 0 {
            return Err(QError::InvalidConfig(
                "max_terms and max_factors must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStatus {
    Converged,
    CapReached,
    Pole,
    OutsideDomain,
}

impl EvalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalStatus::Converged => "Converged",
            EvalStatus::CapReached => "CapReached",
            EvalStatus::Pole => "Pole",
            EvalStatus::OutsideDomain => "OutsideDomain",
        }
    }

    /// The more severe of two statuses, for combined evaluations.
    pub fn worst(self, other: EvalStatus) -> EvalStatus {
        fn rank(s: EvalStatus) -> u8 {
            match s {
                EvalStatus::Converged => 0,
                EvalStatus::CapReached => 1,
                EvalStatus::OutsideDomain => 2,
                EvalStatus::Pole => 3,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for EvalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value together with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    /// Point at which the function was evaluated.
    pub arg: Complex64,
    pub value: Complex64,
    /// Series terms or product factors consumed.
    pub terms_used: usize,
    /// Bound on the truncation and accumulated rounding error of `value`.
    pub err_estimate: f64,
    pub status: EvalStatus,
}

impl EvalResult {
    fn exact(arg: Complex64, value: Complex64) -> Self {
        Self {
            arg,
            value,
            terms_used: 1,
            err_estimate: 0.0,
            status: EvalStatus::Converged,
        }
    }

    fn failed(arg: Complex64, status: EvalStatus, terms_used: usize) -> Self {
        Self {
            arg,
            value: Complex64::new(f64::NAN, f64::NAN),
            terms_used,
            err_estimate: f64::INFINITY,
            status,
        }
    }

    #[inline]
    pub fn is_converged(&self) -> bool {
        self.status == EvalStatus::Converged
    }

    /// The value if converged, otherwise an error naming the failure.
    pub fn ok(&self) -> Result<Complex64> {
        match self.status {
            EvalStatus::Converged => Ok(self.value),
            EvalStatus::Pole => Err(QError::Domain(format!("pole at z = {}", fmt_c(self.arg)))),
            EvalStatus::OutsideDomain => Err(QError::Domain(format!(
                "z = {} lies outside the domain of the series",
                fmt_c(self.arg)
            ))),
            EvalStatus::CapReached => Err(QError::Domain(format!(
                "no convergence at z = {} after {} terms",
                fmt_c(self.arg),
                self.terms_used
            ))),
        }
    }
}

pub(crate) fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Disc of convergence of the `𝓔_q` power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceDisc {
    /// `R_q`; `f64::INFINITY` at `q = 1`.
    pub radius: f64,
    pub q: QParam,
}

impl ConvergenceDisc {
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < self.radius
    }
}

/// `R_q = 2/(1-q)` for `q < 1`, `2q/(q-1)` for `q > 1`, infinite at `q = 1`.
pub fn radius_of_convergence(q: QParam) -> ConvergenceDisc {
    let qv = q.value();
    let radius = match q.regime() {
        Regime::SubOne => 2.0 / (1.0 - qv),
        Regime::One => f64::INFINITY,
        Regime::SuperOne => 2.0 * qv / (qv - 1.0),
    };
    ConvergenceDisc { radius, q }
}

/// Radius of the `e_q` series: the first pole `1/(1-q)` for `q < 1`, none
/// otherwise.
pub fn small_exp_series_radius(q: QParam) -> f64 {
    match q.regime() {
        Regime::SubOne => 1.0 / (1.0 - q.value()),
        _ => f64::INFINITY,
    }
}

/// Radius of the `E_q` series: `q/(q-1)` for `q > 1`, none otherwise.
pub fn big_exp_series_radius(q: QParam) -> f64 {
    small_exp_series_radius(q.inverse())
}

// ---------------------------------------------------------------------------
// series engine

/// Yields the denominators `b_1, b_2, …` of a series `Σ z^n / (b_1⋯b_n)`.
/// Every sequence used here is non-decreasing, which makes the geometric
/// tail bound below valid.
trait Denominators {
    fn next_denominator(&mut self) -> Dd;
}

/// `[n]_q = 1 + q + … + q^{n-1}`.
struct PlainBrackets {
    q: f64,
    power: Dd,
    sum: Dd,
}

impl PlainBrackets {
    fn new(q: f64) -> Self {
        Self {
            q,
            power: Dd::ONE,
            sum: Dd::ZERO,
        }
    }
}

impl Denominators for PlainBrackets {
    fn next_denominator(&mut self) -> Dd {
        self.sum = self.sum + self.power;
        self.power = self.power.mul_f64(self.q);
        self.sum
    }
}

/// `{n}_q = 2[n]_p / (1 + p^{n-1})` with `p = q` for `q < 1` and the
/// normalised form `p = 1/q` (held in double-double) for `q > 1`.
struct BraceBrackets {
    ratio: Dd,
    power: Dd,
    sum: Dd,
}

impl BraceBrackets {
    fn new(q: f64) -> Self {
        let ratio = if q > 1.0 {
            Dd::ONE / Dd::from_f64(q)
        } else {
            Dd::from_f64(q)
        };
        Self {
            ratio,
            power: Dd::ONE,
            sum: Dd::ZERO,
        }
    }
}

impl Denominators for BraceBrackets {
    fn next_denominator(&mut self) -> Dd {
        self.sum = self.sum + self.power;
        let value = self.sum.mul_f64(2.0) / (Dd::ONE + self.power);
        self.power = self.power * self.ratio;
        value
    }
}

/// `b_n = n`, the classical factorial.
struct Integers(f64);

impl Denominators for Integers {
    fn next_denominator(&mut self) -> Dd {
        self.0 += 1.0;
        Dd::from_f64(self.0)
    }
}

fn sum_series<D: Denominators>(
    z: Complex64,
    mut denominators: D,
    radius: f64,
    cfg: &EvalConfig,
) -> EvalResult {
    let r = z.norm();
    if r >= radius {
        return EvalResult::failed(z, EvalStatus::OutsideDomain, 0);
    }
    if r == 0.0 {
        return EvalResult::exact(z, Complex64::new(1.0, 0.0));
    }
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut abs_sum = 1.0_f64;
    let mut next = denominators.next_denominator();
    let mut used = 1;
    loop {
        if used >= cfg.max_terms {
            return EvalResult {
                arg: z,
                value: sum.to_c64(),
                terms_used: used,
                err_estimate: f64::INFINITY,
                status: EvalStatus::CapReached,
            };
        }
        term = term.mul_c64(z).div_dd(next);
        sum = sum + term;
        abs_sum += term.norm();
        used += 1;
        next = denominators.next_denominator();
        let ratio = r / next.to_f64();
        let tail = if ratio < 1.0 {
            term.norm() * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        let magnitude = sum.norm();
        if tail <= cfg.rel_tol * magnitude || tail < ABSOLUTE_FLOOR {
            // each term carries O(n) double-double roundings; cancellation
            // between terms amplifies them by Σ|t| / |Σ t|
            let rounding = 4.0 * used as f64 * Dd::EPSILON * abs_sum + f64::EPSILON * magnitude;
            return EvalResult {
                arg: z,
                value: sum.to_c64(),
                terms_used: used,
                err_estimate: tail + rounding,
                status: EvalStatus::Converged,
            };
        }
    }
}

fn classical_exp(z: Complex64) -> EvalResult {
    EvalResult::exact(z, z.exp())
}

// ---------------------------------------------------------------------------
// product engine

#[derive(Clone, Copy)]
enum FactorShape {
    /// `1 + w`
    Direct,
    /// `1 / (1 - w)`
    Reciprocal,
    /// `(1 + w) / (1 - w)`
    Cayley,
}

/// `Π_k factor(w_k)` with `w_k = scale · (1-p) p^k z` and `0 < p < 1`.
fn geometric_product(
    z: Complex64,
    p: f64,
    scale: f64,
    shape: FactorShape,
    cfg: &EvalConfig,
) -> EvalResult {
    debug_assert!(p > 0.0 && p < 1.0);
    let one = Complex64::new(1.0, 0.0);
    let log_weight = match shape {
        FactorShape::Cayley => 2.0,
        _ => 1.0,
    };
    let base = z * (scale * (1.0 - p));
    let mut value = one;
    let mut power = 1.0_f64;
    let mut used = 0;
    loop {
        let w = base * power;
        let wn = w.norm();
        if wn < 1.0 {
            // |log factor_k| ≤ c|w_k|/(1-|w_k|) and |w_k| decays like p^k
            let tail = log_weight * wn / ((1.0 - p) * (1.0 - wn));
            if tail <= cfg.rel_tol || value.norm() < ABSOLUTE_FLOOR {
                return EvalResult {
                    arg: z,
                    value,
                    terms_used: used,
                    err_estimate: tail * value.norm(),
                    status: EvalStatus::Converged,
                };
            }
        }
        if used >= cfg.max_factors {
            return EvalResult {
                arg: z,
                value,
                terms_used: used,
                err_estimate: f64::INFINITY,
                status: EvalStatus::CapReached,
            };
        }
        let factor = match shape {
            FactorShape::Direct => one + w,
            FactorShape::Reciprocal | FactorShape::Cayley => {
                let denom = one - w;
                if denom.norm() < POLE_THRESHOLD * (1.0 + wn) {
                    return EvalResult::failed(z, EvalStatus::Pole, used);
                }
                match shape {
                    FactorShape::Reciprocal => denom.inv(),
                    _ => (one + w) / denom,
                }
            }
        };
        value *= factor;
        power *= p;
        used += 1;
    }
}

// ---------------------------------------------------------------------------
// e_q

/// `e_q^z = Σ z^n / [n]!`.
///
/// For `q < 1` the series is refused (`OutsideDomain`) at and beyond the
/// first pole `|z| = 1/(1-q)`; for `q ≥ 1` it is entire.
pub fn eq_small_series(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    if q.is_one() {
        return sum_series(z, Integers(0.0), f64::INFINITY, cfg);
    }
    sum_series(
        z,
        PlainBrackets::new(q.value()),
        small_exp_series_radius(q),
        cfg,
    )
}

/// `e_q^z = Π_k (1 - (1-q) q^k z)^{-1}`; `q > 1` is evaluated as
/// `E_{1/q}^z`, `q = 1` as the classical exponential.
pub fn eq_product(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    match q.regime() {
        Regime::One => classical_exp(z),
        Regime::SubOne => geometric_product(z, q.value(), 1.0, FactorShape::Reciprocal, cfg),
        Regime::SuperOne => {
            geometric_product(z, q.inverse().value(), 1.0, FactorShape::Direct, cfg)
        }
    }
}

/// `E_q^z = Σ z^n / [ñ]!`, evaluated as `e_{1/q}^z`.
pub fn eq_big_series(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    eq_small_series(z, q.inverse(), cfg)
}

/// `E_q^z = Π_k (1 + (1-q) q^k z)`; `q > 1` is evaluated as `e_{1/q}^z`.
pub fn eq_big_product(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    match q.regime() {
        Regime::One => classical_exp(z),
        Regime::SubOne => geometric_product(z, q.value(), 1.0, FactorShape::Direct, cfg),
        Regime::SuperOne => {
            geometric_product(z, q.inverse().value(), 1.0, FactorShape::Reciprocal, cfg)
        }
    }
}

fn use_series(method: Method, z: Complex64, radius: f64) -> bool {
    match method {
        Method::Series => true,
        Method::Product => false,
        Method::Auto => z.norm() < AUTO_SERIES_FRACTION * radius,
    }
}

/// Runs the series when selected; under `Auto` a series result whose error
/// bound misses `rel_tol` (heavy cancellation) is replaced by the product.
fn series_or_product(
    series_selected: bool,
    cfg: &EvalConfig,
    series: impl FnOnce() -> EvalResult,
    product: impl FnOnce() -> EvalResult,
) -> EvalResult {
    if !series_selected {
        return product();
    }
    let result = series();
    let accurate = result.is_converged()
        && result.err_estimate <= cfg.rel_tol * result.value.norm().max(ABSOLUTE_FLOOR);
    if cfg.method == Method::Auto && !accurate {
        product()
    } else {
        result
    }
}

/// `e_q^z` by the method selected in `cfg`.
pub fn eq_small(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    if q.is_one() && cfg.method == Method::Auto {
        return classical_exp(z);
    }
    series_or_product(
        use_series(cfg.method, z, small_exp_series_radius(q)),
        cfg,
        || eq_small_series(z, q, cfg),
        || eq_product(z, q, cfg),
    )
}

/// `E_q^z` by the method selected in `cfg`.
pub fn eq_big(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    if q.is_one() && cfg.method == Method::Auto {
        return classical_exp(z);
    }
    series_or_product(
        use_series(cfg.method, z, big_exp_series_radius(q)),
        cfg,
        || eq_big_series(z, q, cfg),
        || eq_big_product(z, q, cfg),
    )
}

// ---------------------------------------------------------------------------
// 𝓔_q

/// `𝓔_q^z = Σ z^n / {n}!`, valid for `|z| < R_q`.
pub fn cal_e_series(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    if q.is_one() {
        return sum_series(z, Integers(0.0), f64::INFINITY, cfg);
    }
    sum_series(
        z,
        BraceBrackets::new(q.value()),
        radius_of_convergence(q).radius,
        cfg,
    )
}

/// `𝓔_q^z = Π_k (1 + q^k(1-q) z/2) / (1 - q^k(1-q) z/2)`.
///
/// `q > 1` is evaluated at `1/q`; `q = 1` is the classical exponential.
pub fn cal_e_product(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    if q.is_one() {
        return classical_exp(z);
    }
    geometric_product(z, q.reduced().value(), 0.5, FactorShape::Cayley, cfg)
}

/// `𝓔_q^z` by the method selected in `cfg`.
///
/// `Auto` uses the exact exponential at `q = 1`, the series inside
/// `0.75·R_q` unless cancellation spoils it, and the product elsewhere.
pub fn cal_e(z: Complex64, q: QParam, cfg: &EvalConfig) -> EvalResult {
    if q.is_one() && cfg.method == Method::Auto {
        return classical_exp(z);
    }
    series_or_product(
        use_series(cfg.method, z, radius_of_convergence(q).radius),
        cfg,
        || cal_e_series(z, q, cfg),
        || cal_e_product(z, q, cfg),
    )
}

/// The first `count` terms `z^n/{n}!` of the `𝓔_q` series in plain `f64`.
pub fn cal_e_series_terms(z: Complex64, q: QParam, count: usize) -> Vec<Complex64> {
    let mut terms = Vec::with_capacity(count);
    let mut term = Complex64::new(1.0, 0.0);
    for n in 0..count {
        if n > 0 {
            term = term * z / crate::qcore::brace_bracket(n as u32, q);
        }
        terms.push(term);
    }
    terms
}

// ---------------------------------------------------------------------------
// Cayley transform

/// `cay(z, a) = (1 + a z) / (1 - a z)`.
pub fn cayley(z: Complex64, a: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let denom = one - z * a;
    if denom.norm() < POLE_THRESHOLD * (1.0 + a.abs() * z.norm()) {
        return Err(QError::Domain(format!(
            "Cayley transform has a pole at z = {} for a = {a}",
            fmt_c(z)
        )));
    }
    Ok((one + z * a) / denom)
}

/// Given `𝓔_q^z`, returns `𝓔_q^{qz} = cay(-z/2, 1-q) · 𝓔_q^z`.
pub fn cayley_step(value_at_z: Complex64, z: Complex64, q: QParam) -> Result<Complex64> {
    Ok(cayley(-z * 0.5, 1.0 - q.value())? * value_at_z)
}
