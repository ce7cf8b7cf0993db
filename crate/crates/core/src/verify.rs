//! Numerical identity checker.
//!
//! Every relation between the q-functions is registered as an
//! [`IdentityId`] with a residual (left side minus right side), a default
//! sample grid and a default tolerance. [`run_identity`] evaluates the
//! residual over a grid and [`run_all`] runs the whole registry.
//!
//! Residuals are absolute when the right-hand side is the constant 0 or 1
//! and `|L - R| / (1 + |R|)` when both sides are functions. The
//! combinatorial identities use a plain relative residual.
//!
//! Points whose evaluation does not converge, or that sit within
//! [`POLE_EXCLUSION`] of a known pole, are counted as skipped rather than
//! failing the run.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{QError, Result};
use crate::par::{map_ordered, Execution};
use crate::param::QParam;
use crate::qcore::{
    brace_bracket, gauss_binomial_sum, q_factorial, try_average_operator, try_jackson_derivative,
    FactorialKind,
};
use crate::qexp::{self, EvalConfig, Method};
use crate::qtrig::{self, TrigValue};

pub const DEFAULT_SEED: u64 = 42;
/// Deformation parameters of the default grids.
pub const DEFAULT_Q: [f64; 5] = [0.3, 0.5, 0.9, 2.0, 5.0];
/// Points per identity in the default grids (split evenly across `q`).
pub const DEFAULT_POINTS: usize = 200;
/// Points this close to a known pole are skipped.
pub const POLE_EXCLUSION: f64 = 1e-6;
/// Half-width of the real-argument grids for the improved family.
pub const IMPROVED_HALF_WIDTH: f64 = 20.0;
/// Largest order used by the combinatorial identities.
pub const MAX_ORDER: u32 = 20;
/// Longest run of Cayley steps checked from one seed.
pub const CAYLEY_STEPS: i32 = 40;
/// Derivative identities keep `|z|` at least this far from 0.
const MIN_DERIVATIVE_ARG: f64 = 1e-3;

macro_rules! identities {
    ($($variant:ident => $tol:expr),* $(,)?) => {
        /// Registered identities.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum IdentityId {
            $($variant),*
        }

        impl IdentityId {
            pub fn name(self) -> &'static str {
                match self {
                    $(IdentityId::$variant => stringify!($variant)),*
                }
            }

            pub fn default_tolerance(self) -> f64 {
                match self {
                    $(IdentityId::$variant => $tol),*
                }
            }

            const EVERY: &'static [IdentityId] = &[$(IdentityId::$variant),*];
        }
    };
}

identities! {
    TildeFactorial => 1e-12,
    GaussBinomialSum => 1e-12,
    BraceDuality => 1e-14,
    BraceTwo => 1e-15,
    SmallExpDerivative => 1e-9,
    BigExpDerivative => 1e-9,
    ClassicalInverse => 1e-11,
    SeriesProduct => 1e-11,
    Factorization => 1e-11,
    Inverse => 1e-11,
    UnitModulus => 1e-11,
    Duality => 1e-11,
    ImprovedExpDerivative => 1e-9,
    CayleyStep => 1e-9,
    StandardComplement => 1e-10,
    TangentsCoincide => 1e-10,
    SinDerivative => 1e-9,
    CosDerivative => 1e-9,
    BigSinDerivative => 1e-9,
    BigCosDerivative => 1e-9,
    Pythagorean => 1e-11,
    ImprovedSinDerivative => 1e-9,
    ImprovedCosDerivative => 1e-9,
    Boundedness => 1e-11,
    Realness => 1e-12,
    Parity => 1e-12,
    DoubleAngleProduct => 1e-10,
    DoubleAngleTangent => 1e-10,
    StandardPythagorean => 1e-11,
    ClassicalLimit => 0.0,
}

impl IdentityId {
    /// Identities that hold and make up [`run_all`], in report order.
    pub fn registry() -> &'static [IdentityId] {
        // negative control and the q → 1 check sit at the end of EVERY
        &Self::EVERY[..Self::EVERY.len() - 2]
    }

    /// Checks that must fail: the standard family violates the
    /// Pythagorean identity.
    pub const NEGATIVE_CONTROLS: [IdentityId; 1] = [IdentityId::StandardPythagorean];

    /// Whether grid arguments are real `x` fed to trigonometric functions
    /// (or to `𝓔_q` at `ix`) rather than complex exponential arguments.
    pub fn takes_real_argument(self) -> bool {
        use IdentityId::*;
        matches!(
            self,
            UnitModulus
                | StandardComplement
                | TangentsCoincide
                | SinDerivative
                | CosDerivative
                | BigSinDerivative
                | BigCosDerivative
                | Pythagorean
                | ImprovedSinDerivative
                | ImprovedCosDerivative
                | Boundedness
                | Realness
                | Parity
                | DoubleAngleProduct
                | DoubleAngleTangent
                | StandardPythagorean
        )
    }

    /// Whether the identity is one of the derivative relations.
    pub fn is_derivative(self) -> bool {
        use IdentityId::*;
        matches!(
            self,
            SmallExpDerivative
                | BigExpDerivative
                | ImprovedExpDerivative
                | SinDerivative
                | CosDerivative
                | BigSinDerivative
                | BigCosDerivative
                | ImprovedSinDerivative
                | ImprovedCosDerivative
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        Self::EVERY
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| QError::UnknownIdentity(s.to_string()))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// One grid point: an argument (an order `n` for the combinatorial
/// identities, a real `x` for the trigonometric ones) and a parameter `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub arg: Complex64,
    pub q: f64,
}

impl SamplePoint {
    pub fn new(arg: Complex64, q: f64) -> Self {
        Self { arg, q }
    }

    pub fn real(x: f64, q: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySpec {
    pub id: IdentityId,
    pub grid: Vec<SamplePoint>,
    pub tolerance: f64,
}

impl IdentitySpec {
    /// Default grid and tolerance for `id`.
    pub fn default_for(id: IdentityId, seed: u64) -> Self {
        Self {
            id,
            grid: default_grid(id, seed),
            tolerance: id.default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstPoint {
    pub arg_re: f64,
    pub arg_im: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub samples_evaluated: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub worst_point: WorstPoint,
    pub passed: bool,
    #[serde(skip)]
    pub tolerance: f64,
}

// ---------------------------------------------------------------------------
// grids

fn rng_for(id: IdentityId, seed: u64) -> ChaCha8Rng {
    let index = IdentityId::EVERY.iter().position(|&i| i == id).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(seed ^ (index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn qp(q: f64) -> QParam {
    // grid values are positive and finite by construction
    QParam::new(q).unwrap_or_else(|_| QParam::one())
}

/// Radius of the `e_q` series, or `R_q` where `e_q` is entire.
fn small_exp_scale(q: QParam) -> f64 {
    finite_or(
        qexp::small_exp_series_radius(q),
        qexp::radius_of_convergence(q).radius,
    )
}

fn big_exp_scale(q: QParam) -> f64 {
    finite_or(
        qexp::big_exp_series_radius(q),
        qexp::radius_of_convergence(q).radius,
    )
}

fn finite_or(a: f64, b: f64) -> f64 {
    if a.is_finite() {
        a
    } else {
        b
    }
}

/// Half-width of the real interval on which both standard families are
/// evaluated through convergent series.
pub fn standard_half_width(q: QParam) -> f64 {
    0.9 * small_exp_scale(q).min(big_exp_scale(q))
}

/// Uniform point in the annulus `min_r ≤ |z| < radius`.
fn disc_point(rng: &mut ChaCha8Rng, radius: f64, min_r: f64) -> Complex64 {
    let r = (min_r * min_r + (radius * radius - min_r * min_r) * rng.gen::<f64>()).sqrt();
    Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
}

fn line_point(rng: &mut ChaCha8Rng, half_width: f64, min_abs: f64) -> f64 {
    loop {
        let x = half_width * (2.0 * rng.gen::<f64>() - 1.0);
        if x.abs() >= min_abs {
            return x;
        }
    }
}

/// Known pole locations of `e_q`, `E_q` and `𝓔_q` (all on the positive
/// real axis) up to `limit` in modulus.
fn known_poles(q: QParam, limit: f64) -> Vec<f64> {
    if q.is_one() {
        return Vec::new();
    }
    let p = q.reduced().value();
    let mut poles = Vec::new();
    // e_q (q<1) or E_q (q>1): 1/((1-p)p^k); 𝓔_q: 2/((1-p)p^k)
    let mut base = 1.0 / (1.0 - p);
    while base <= limit && poles.len() < 4096 {
        poles.push(base);
        poles.push(2.0 * base);
        base /= p;
    }
    poles
}

/// Whether any of the points the identity evaluates lies near a pole.
fn pole_adjacent(id: IdentityId, point: &SamplePoint) -> bool {
    use IdentityId::*;
    if matches!(
        id,
        TildeFactorial | GaussBinomialSum | BraceDuality | BraceTwo | ClassicalLimit
    ) {
        return false;
    }
    let q = qp(point.q);
    // the trigonometric identities and the unit-modulus check evaluate at ±ix
    let z = if id.takes_real_argument() {
        point.arg * Complex64::new(0.0, 1.0)
    } else {
        point.arg
    };
    let touched = [z, -z, z * q.value(), z * 0.5, -z * 0.5, z * 2.0];
    let limit = touched.iter().map(|w| w.norm()).fold(0.0, f64::max) + 1.0;
    let poles = known_poles(q, limit);
    touched.iter().any(|w| {
        poles
            .iter()
            .any(|&p| (w - Complex64::new(p, 0.0)).norm() < POLE_EXCLUSION)
    })
}

fn orders_grid(qs: &[f64]) -> Vec<SamplePoint> {
    qs.iter()
        .flat_map(|&q| (0..=MAX_ORDER).map(move |n| SamplePoint::real(n as f64, q)))
        .collect()
}

/// The default sample grid of `id`.
pub fn default_grid(id: IdentityId, seed: u64) -> Vec<SamplePoint> {
    sample_grid(id, seed, &DEFAULT_Q, DEFAULT_POINTS / DEFAULT_Q.len())
}

/// A sample grid for `id` with `per_q` points for every parameter in `qs`.
///
/// The combinatorial identities ignore `per_q` and use the orders
/// `0..=MAX_ORDER`.
pub fn sample_grid(id: IdentityId, seed: u64, qs: &[f64], per_q: usize) -> Vec<SamplePoint> {
    use IdentityId::*;
    let mut rng = rng_for(id, seed);
    let min_r = if id.is_derivative() {
        MIN_DERIVATIVE_ARG
    } else {
        0.0
    };
    match id {
        TildeFactorial | GaussBinomialSum | BraceDuality => orders_grid(qs),
        BraceTwo => {
            let mut grid: Vec<_> = qs.iter().map(|&q| SamplePoint::real(2.0, q)).collect();
            grid.extend((0..per_q).map(|_| {
                let q = 10f64.powf(4.0 * rng.gen::<f64>() - 2.0);
                SamplePoint::real(2.0, q)
            }));
            grid
        }
        ClassicalLimit => {
            let n = per_q.max(2);
            qs.iter()
                .flat_map(|&q| {
                    (0..n)
                        .map(move |i| SamplePoint::real(-1.0 + 2.0 * i as f64 / (n - 1) as f64, q))
                })
                .collect()
        }
        _ => {
            let mut grid = Vec::with_capacity(per_q * qs.len());
            for &qv in qs {
                let q = qp(qv);
                let shrink = qv.max(1.0);
                let mut count = 0;
                while count < per_q {
                    let point = match id {
                        SmallExpDerivative => SamplePoint::new(
                            disc_point(&mut rng, 0.6 * small_exp_scale(q) / shrink, min_r),
                            qv,
                        ),
                        BigExpDerivative => SamplePoint::new(
                            disc_point(&mut rng, 0.6 * big_exp_scale(q) / shrink, min_r),
                            qv,
                        ),
                        ClassicalInverse => SamplePoint::new(
                            disc_point(
                                &mut rng,
                                0.6 * small_exp_scale(q).min(big_exp_scale(q)),
                                0.0,
                            ),
                            qv,
                        ),
                        SeriesProduct | Factorization | Inverse | Duality => SamplePoint::new(
                            disc_point(&mut rng, 0.6 * qexp::radius_of_convergence(q).radius, 0.0),
                            qv,
                        ),
                        ImprovedExpDerivative => SamplePoint::new(
                            disc_point(
                                &mut rng,
                                0.6 * qexp::radius_of_convergence(q).radius / shrink,
                                min_r,
                            ),
                            qv,
                        ),
                        CayleyStep => {
                            let r = 0.5 * qexp::radius_of_convergence(q).radius * rng.gen::<f64>();
                            let theta = 0.2 + (PI - 0.4) * rng.gen::<f64>();
                            SamplePoint::new(Complex64::from_polar(r.max(1e-2), theta), qv)
                        }
                        UnitModulus => SamplePoint::real(line_point(&mut rng, 100.0, 0.0), qv),
                        StandardComplement | TangentsCoincide | DoubleAngleProduct
                        | DoubleAngleTangent | StandardPythagorean => {
                            SamplePoint::real(line_point(&mut rng, standard_half_width(q), 0.0), qv)
                        }
                        SinDerivative | CosDerivative | BigSinDerivative | BigCosDerivative => {
                            SamplePoint::real(
                                line_point(&mut rng, standard_half_width(q) / shrink, min_r),
                                qv,
                            )
                        }
                        _ => {
                            SamplePoint::real(line_point(&mut rng, IMPROVED_HALF_WIDTH, min_r), qv)
                        }
                    };
                    grid.push(point);
                    count += 1;
                }
            }
            grid
        }
    }
}

// ---------------------------------------------------------------------------
// residuals

fn abs_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm()
}

fn mixed_residual(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / (1.0 + rhs.norm())
}

fn rel_residual(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        0.0
    } else {
        (lhs - rhs).abs() / rhs.abs()
    }
}

type Eval = fn(Complex64, QParam, &EvalConfig) -> qexp::EvalResult;
type Trig = fn(Complex64, QParam, &EvalConfig) -> TrigValue;

fn ev(f: Eval, z: Complex64, q: QParam, cfg: &EvalConfig) -> Result<Complex64> {
    f(z, q, cfg).ok()
}

fn tv(f: Trig, x: Complex64, q: QParam, cfg: &EvalConfig) -> Result<Complex64> {
    f(x, q, cfg).ok()
}

fn order(point: &SamplePoint) -> u32 {
    point.arg.re.round().max(0.0) as u32
}

/// `L - R` measure for one identity at one point; `Err` means the point
/// could not be evaluated and is skipped.
fn residual(id: IdentityId, point: &SamplePoint, cfg: &EvalConfig) -> Result<f64> {
    use IdentityId::*;
    let q = QParam::new(point.q)?;
    let qv = q.value();
    let z = point.arg;
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(match id {
        TildeFactorial => {
            let n = order(point);
            let tilde = q_factorial(n, q, FactorialKind::Tilde)?;
            let plain = q_factorial(n, q, FactorialKind::Plain)?;
            let nf = n as f64;
            rel_residual(tilde, qv.powf((1.0 - nf) * nf / 2.0) * plain)
        }
        GaussBinomialSum => {
            let n = order(point);
            let product: f64 = (0..n).map(|k| 1.0 + qv.powi(k as i32)).product();
            rel_residual(gauss_binomial_sum(n, q), product)
        }
        BraceDuality => {
            let n = order(point).max(1);
            rel_residual(brace_bracket(n, q), brace_bracket(n, q.inverse()))
        }
        BraceTwo => (brace_bracket(2, q) - 2.0).abs(),
        SmallExpDerivative => {
            let d = try_jackson_derivative(|w| ev(qexp::eq_small, w, q, cfg), z, q)?;
            mixed_residual(d, ev(qexp::eq_small, z, q, cfg)?)
        }
        BigExpDerivative => {
            let d = try_jackson_derivative(|w| ev(qexp::eq_big, w, q, cfg), z, q)?;
            mixed_residual(d, ev(qexp::eq_big, z * qv, q, cfg)?)
        }
        ClassicalInverse => abs_residual(
            ev(qexp::eq_small, z, q, cfg)? * ev(qexp::eq_big, -z, q, cfg)?,
            one,
        ),
        SeriesProduct => mixed_residual(
            ev(qexp::cal_e_series, z, q, cfg)?,
            ev(qexp::cal_e_product, z, q, cfg)?,
        ),
        Factorization => mixed_residual(
            ev(qexp::cal_e, z, q, cfg)?,
            ev(qexp::eq_small, z * 0.5, q, cfg)? * ev(qexp::eq_big, z * 0.5, q, cfg)?,
        ),
        Inverse => abs_residual(
            ev(qexp::cal_e, z, q, cfg)? * ev(qexp::cal_e, -z, q, cfg)?,
            one,
        ),
        UnitModulus => (ev(qexp::cal_e, i * z, q, cfg)?.norm() - 1.0).abs(),
        Duality => {
            // each side by a different route: series at q against product at 1/q
            let dual = q.inverse();
            let a = mixed_residual(
                ev(qexp::cal_e_series, z, q, cfg)?,
                ev(qexp::cal_e_product, z, dual, cfg)?,
            );
            let b = mixed_residual(
                ev(qexp::cal_e_product, z, q, cfg)?,
                ev(qexp::cal_e_series, z, dual, cfg)?,
            );
            a.max(b)
        }
        ImprovedExpDerivative => {
            let f = |w| ev(qexp::cal_e, w, q, cfg);
            mixed_residual(
                try_jackson_derivative(f, z, q)?,
                try_average_operator(f, z, q)?,
            )
        }
        CayleyStep => {
            let mut value = ev(qexp::cal_e, z, q, cfg)?;
            let mut worst = 0.0_f64;
            for k in 0..CAYLEY_STEPS {
                let zk = z * qv.powi(k);
                value = qexp::cayley_step(value, zk, q)?;
                let direct = ev(qexp::cal_e, z * qv.powi(k + 1), q, cfg)?;
                worst = worst.max((value - direct).norm() / direct.norm());
            }
            worst
        }
        StandardComplement => {
            let (s, c) = qtrig::sin_cos_q(z, q, cfg);
            let (bs, bc) = qtrig::big_sin_cos_q(z, q, cfg);
            abs_residual(c.ok()? * bc.ok()? + s.ok()? * bs.ok()?, one)
        }
        TangentsCoincide => {
            let (s, c) = qtrig::sin_cos_q(z, q, cfg);
            let (bs, bc) = qtrig::big_sin_cos_q(z, q, cfg);
            abs_residual(s.ok()? * bc.ok()?, c.ok()? * bs.ok()?)
        }
        SinDerivative => {
            let d = try_jackson_derivative(|w| tv(qtrig::sin_q, w, q, cfg), z, q)?;
            mixed_residual(d, tv(qtrig::cos_q, z, q, cfg)?)
        }
        CosDerivative => {
            let d = try_jackson_derivative(|w| tv(qtrig::cos_q, w, q, cfg), z, q)?;
            mixed_residual(d, -tv(qtrig::sin_q, z, q, cfg)?)
        }
        BigSinDerivative => {
            let d = try_jackson_derivative(|w| tv(qtrig::big_sin_q, w, q, cfg), z, q)?;
            mixed_residual(d, tv(qtrig::big_cos_q, z * qv, q, cfg)?)
        }
        BigCosDerivative => {
            let d = try_jackson_derivative(|w| tv(qtrig::big_cos_q, w, q, cfg), z, q)?;
            mixed_residual(d, -tv(qtrig::big_sin_q, z * qv, q, cfg)?)
        }
        Pythagorean => {
            let (s, c) = qtrig::cal_sin_cos(z, q, cfg);
            abs_residual(s.ok()?.powu(2) + c.ok()?.powu(2), one)
        }
        ImprovedSinDerivative => {
            let d = try_jackson_derivative(|w| tv(qtrig::cal_sin, w, q, cfg), z, q)?;
            let avg = try_average_operator(|w| tv(qtrig::cal_cos, w, q, cfg), z, q)?;
            mixed_residual(d, avg)
        }
        ImprovedCosDerivative => {
            let d = try_jackson_derivative(|w| tv(qtrig::cal_cos, w, q, cfg), z, q)?;
            let avg = try_average_operator(|w| tv(qtrig::cal_sin, w, q, cfg), z, q)?;
            mixed_residual(d, -avg)
        }
        Boundedness => {
            let (s, c) = qtrig::cal_sin_cos(z, q, cfg);
            let m = s.ok()?.norm().max(c.ok()?.norm());
            (m - 1.0).max(0.0)
        }
        Realness => {
            let (s, c) = qtrig::cal_sin_cos(z, q, cfg);
            let (s, c) = (s.ok().map(|_| s)?, c.ok().map(|_| c)?);
            let measure = |t: TrigValue| t.imag_residue / (1.0 + t.value.norm());
            measure(s).max(measure(c))
        }
        Parity => {
            let (s, c) = qtrig::cal_sin_cos(z, q, cfg);
            let (ms, mc) = qtrig::cal_sin_cos(-z, q, cfg);
            abs_residual(ms.ok()?, -s.ok()?).max(abs_residual(mc.ok()?, c.ok()?))
        }
        DoubleAngleProduct => {
            let (s, c) = qtrig::sin_cos_q(z, q, cfg);
            let (bs, bc) = qtrig::big_sin_cos_q(z, q, cfg);
            let (s, c, bs, bc) = (s.ok()?, c.ok()?, bs.ok()?, bc.ok()?);
            let (s2, c2) = qtrig::cal_sin_cos(z * 2.0, q, cfg);
            mixed_residual(c2.ok()?, c * bc - s * bs).max(mixed_residual(s2.ok()?, s * bc + c * bs))
        }
        DoubleAngleTangent => {
            let t = tv(qtrig::tan_q, z, q, cfg)?;
            let (s2, c2) = qtrig::cal_sin_cos(z * 2.0, q, cfg);
            let denom = one + t * t;
            mixed_residual(c2.ok()?, (one - t * t) / denom)
                .max(mixed_residual(s2.ok()?, 2.0 * t / denom))
        }
        StandardPythagorean => {
            let (s, c) = qtrig::sin_cos_q(z, q, cfg);
            abs_residual(s.ok()?.powu(2) + c.ok()?.powu(2), one)
        }
        ClassicalLimit => abs_residual(ev(qexp::cal_e, z, q, cfg)?, z.exp()),
    })
}

/// Evaluates `spec` point by point.
pub fn run_identity(spec: &IdentitySpec, exec: Execution) -> IdentityReport {
    let cfg = EvalConfig::default().with_method(Method::Auto);
    let residuals: Vec<Option<f64>> = map_ordered(&spec.grid, exec, |point| {
        if pole_adjacent(spec.id, point) {
            return None;
        }
        residual(spec.id, point, &cfg)
            .ok()
            .map(|r| if r.is_nan() { f64::INFINITY } else { r })
    });

    let mut evaluated = 0;
    let mut sum = 0.0;
    let mut max = 0.0_f64;
    let mut worst = None;
    for (point, r) in spec.grid.iter().zip(&residuals) {
        if let Some(r) = *r {
            evaluated += 1;
            sum += r;
            if worst.is_none() || r > max {
                max = r;
                worst = Some(*point);
            }
        }
    }
    let worst = worst.unwrap_or(SamplePoint::real(0.0, 0.0));
    IdentityReport {
        id: spec.id,
        samples_evaluated: evaluated,
        skipped: spec.grid.len() - evaluated,
        max_residual: max,
        mean_residual: if evaluated > 0 {
            sum / evaluated as f64
        } else {
            0.0
        },
        worst_point: WorstPoint {
            arg_re: worst.arg.re,
            arg_im: worst.arg.im,
            q: worst.q,
        },
        passed: evaluated > 0 && max <= spec.tolerance,
        tolerance: spec.tolerance,
    }
}

/// Settings for [`run_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub tolerance_overrides: HashMap<IdentityId, f64>,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerance_overrides: HashMap::new(),
            execution: Execution::default(),
        }
    }
}

/// Parses `Name=value` tolerance overrides.
pub fn parse_override(text: &str) -> Result<(IdentityId, f64)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| QError::UnknownIdentity(text.to_string()))?;
    let id = name.trim().parse()?;
    let tol = value
        .trim()
        .parse::<f64>()
        .map_err(|e| QError::InvalidConfig(format!("bad tolerance `{value}`: {e}")))?;
    Ok((id, tol))
}

/// Runs the registry with default grids, in registry order.
pub fn run_all(options: &VerifyOptions) -> Vec<IdentityReport> {
    map_ordered(IdentityId::registry(), options.execution, |&id| {
        let mut spec = IdentitySpec::default_for(id, options.seed);
        if let Some(&tol) = options.tolerance_overrides.get(&id) {
            spec.tolerance = tol;
        }
        run_identity(&spec, options.execution)
    })
}

/// Deviation of `𝓔_q` from the classical exponential on `grid`.
///
/// The tolerance is `|q - 1|`, so `q = 1` demands an exact match.
pub fn classical_limit_check(q_near_one: f64, grid: &[Complex64]) -> Result<IdentityReport> {
    let distance = (q_near_one - 1.0).abs();
    if distance.is_nan() || distance >= 0.1 {
        return Err(QError::Domain(format!(
            "classical limit check needs |q - 1| < 0.1, got q = {q_near_one}"
        )));
    }
    let spec = IdentitySpec {
        id: IdentityId::ClassicalLimit,
        grid: grid
            .iter()
            .map(|&z| SamplePoint::new(z, q_near_one))
            .collect(),
        tolerance: (q_near_one - 1.0).abs(),
    };
    Ok(run_identity(&spec, Execution::default()))
}
