//! q-trigonometric functions.
//!
//! The standard families are built from `e_q` (`sin_q`, `cos_q`) and `E_q`
//! (`Sin_q`, `Cos_q`); the improved family (`𝒮in_q`, `𝒞os_q`) is built from
//! `𝓔_q`. All take a complex argument. For a real argument the result is
//! real up to rounding; the imaginary residue is kept in
//! [`TrigValue::imag_residue`] and dropped when it is below
//! [`REALNESS_THRESHOLD`]` · (1 + |value|)`.

use num_complex::Complex64;

use crate::param::QParam;
use crate::qexp::{self, EvalConfig, EvalResult, EvalStatus};

pub const REALNESS_THRESHOLD: f64 = 1e-12;
/// `tan_q` reports a pole where `|cos_q|` falls below this.
pub const TAN_POLE_THRESHOLD: f64 = 1e-13;

type ExpFn = fn(Complex64, QParam, &EvalConfig) -> EvalResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigValue {
    pub value: Complex64,
    pub status: EvalStatus,
    /// Imaginary part before truncation (only meaningful for real input).
    pub imag_residue: f64,
    /// Set when a real argument produced an imaginary part above the
    /// realness threshold; `value` is then left untruncated.
    pub residue_warning: bool,
}

impl TrigValue {
    fn from_parts(value: Complex64, status: EvalStatus, real_input: bool) -> Self {
        if status != EvalStatus::Converged {
            return Self {
                value: Complex64::new(f64::NAN, f64::NAN),
                status,
                imag_residue: f64::NAN,
                residue_warning: false,
            };
        }
        if !real_input {
            return Self {
                value,
                status,
                imag_residue: value.im.abs(),
                residue_warning: false,
            };
        }
        let residue = value.im.abs();
        let ok = residue <= REALNESS_THRESHOLD * (1.0 + value.norm());
        Self {
            value: if ok {
                Complex64::new(value.re, 0.0)
            } else {
                value
            },
            status,
            imag_residue: residue,
            residue_warning: !ok,
        }
    }

    #[inline]
    pub fn is_converged(&self) -> bool {
        self.status == EvalStatus::Converged
    }

    /// Real part; the whole value for real arguments.
    #[inline]
    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// The value if converged, otherwise an error describing the failure.
    pub fn ok(&self) -> crate::error::Result<Complex64> {
        match self.status {
            EvalStatus::Converged => Ok(self.value),
            s => Err(crate::error::QError::Domain(format!(
                "q-trigonometric evaluation failed with status {s}"
            ))),
        }
    }
}

/// `((f(ix) - f(-ix)) / 2i, (f(ix) + f(-ix)) / 2)`.
fn sin_cos_from(exp: ExpFn, x: Complex64, q: QParam, cfg: &EvalConfig) -> (TrigValue, TrigValue) {
    let i = Complex64::new(0.0, 1.0);
    let plus = exp(i * x, q, cfg);
    let minus = exp(-i * x, q, cfg);
    let status = plus.status.worst(minus.status);
    let real_input = x.im == 0.0;
    let sin = (plus.value - minus.value) / (2.0 * i);
    let cos = (plus.value + minus.value) * 0.5;
    (
        TrigValue::from_parts(sin, status, real_input),
        TrigValue::from_parts(cos, status, real_input),
    )
}

fn tan_from(exp: ExpFn, x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    let (sin, cos) = sin_cos_from(exp, x, q, cfg);
    if !cos.is_converged() {
        return cos;
    }
    if cos.value.norm() < TAN_POLE_THRESHOLD {
        return TrigValue::from_parts(Complex64::default(), EvalStatus::Pole, false);
    }
    TrigValue::from_parts(sin.value / cos.value, EvalStatus::Converged, x.im == 0.0)
}

/// `(sin_q x, cos_q x)` from one pair of `e_q` evaluations.
pub fn sin_cos_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> (TrigValue, TrigValue) {
    sin_cos_from(qexp::eq_small, x, q, cfg)
}

pub fn sin_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    sin_cos_q(x, q, cfg).0
}

pub fn cos_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    sin_cos_q(x, q, cfg).1
}

/// `(Sin_q x, Cos_q x)` from one pair of `E_q` evaluations.
pub fn big_sin_cos_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> (TrigValue, TrigValue) {
    sin_cos_from(qexp::eq_big, x, q, cfg)
}

pub fn big_sin_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    big_sin_cos_q(x, q, cfg).0
}

pub fn big_cos_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    big_sin_cos_q(x, q, cfg).1
}

/// `tan_q x = sin_q x / cos_q x`; `Pole` near zeros of `cos_q`.
pub fn tan_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    tan_from(qexp::eq_small, x, q, cfg)
}

/// `Tan_q x = Sin_q x / Cos_q x`, which coincides with `tan_q`.
pub fn big_tan_q(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    tan_from(qexp::eq_big, x, q, cfg)
}

/// `(𝒮in_q x, 𝒞os_q x)` from one pair of `𝓔_q` evaluations.
pub fn cal_sin_cos(x: Complex64, q: QParam, cfg: &EvalConfig) -> (TrigValue, TrigValue) {
    sin_cos_from(qexp::cal_e, x, q, cfg)
}

/// `𝒮in_q x = (𝓔_q^{ix} - 𝓔_q^{-ix}) / 2i`.
pub fn cal_sin(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    cal_sin_cos(x, q, cfg).0
}

/// `𝒞os_q x = (𝓔_q^{ix} + 𝓔_q^{-ix}) / 2`.
pub fn cal_cos(x: Complex64, q: QParam, cfg: &EvalConfig) -> TrigValue {
    cal_sin_cos(x, q, cfg).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn qp(q: f64) -> QParam {
        QParam::new(q).unwrap()
    }

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn values_at_zero() {
        for q in [0.3, 1.0, 2.0] {
            let q = qp(q);
            assert_eq!(sin_q(r(0.0), q, &cfg()).re(), 0.0);
            assert_eq!(cos_q(r(0.0), q, &cfg()).re(), 1.0);
            assert_eq!(big_sin_q(r(0.0), q, &cfg()).re(), 0.0);
            assert_eq!(big_cos_q(r(0.0), q, &cfg()).re(), 1.0);
            assert_eq!(tan_q(r(0.0), q, &cfg()).re(), 0.0);
            assert_eq!(cal_sin(r(0.0), q, &cfg()).re(), 0.0);
            assert_eq!(cal_cos(r(0.0), q, &cfg()).re(), 1.0);
        }
    }

    #[test]
    fn classical_limit() {
        let one = qp(1.0);
        assert!((sin_q(r(FRAC_PI_2), one, &cfg()).re() - 1.0).abs() < 1e-12);
        assert!(cos_q(r(FRAC_PI_2), one, &cfg()).re().abs() < 1e-12);
        assert!((tan_q(r(FRAC_PI_4), one, &cfg()).re() - 1.0).abs() < 1e-12);
        assert!((cal_cos(r(1.0), one, &cfg()).re() - 1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn real_input_gives_real_output() {
        for x in [-7.5, 0.3, 12.0, 40.0] {
            let (s, c) = cal_sin_cos(r(x), qp(0.5), &cfg());
            assert_eq!(s.value.im, 0.0);
            assert_eq!(c.value.im, 0.0);
            assert!(!s.residue_warning && !c.residue_warning);
        }
    }

    #[test]
    fn tangents_coincide() {
        let q = qp(0.5);
        let t = tan_q(r(0.7), q, &cfg()).re();
        let big_t = big_tan_q(r(0.7), q, &cfg()).re();
        assert!((t - big_t).abs() < 1e-10);
    }

    #[test]
    fn improved_pythagorean() {
        for x in [0.1, 1.0, 3.3, -17.0] {
            let (s, c) = cal_sin_cos(r(x), qp(0.5), &cfg());
            assert!((s.re().powi(2) + c.re().powi(2) - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn double_angle_against_standard_family() {
        let q = qp(0.5);
        let x = 1.0;
        let (s, c) = sin_cos_q(r(x), q, &cfg());
        let (bs, bc) = big_sin_cos_q(r(x), q, &cfg());
        let lhs = cal_cos(r(2.0 * x), q, &cfg()).re();
        assert!((lhs - (c.re() * bc.re() - s.re() * bs.re())).abs() < 1e-12);
    }

    #[test]
    fn tan_pole_is_reported() {
        // cos_q has a zero in (0, 4) for q = 0.5; bracket it by bisection
        let q = qp(0.5);
        let f = |x: f64| cos_q(r(x), q, &cfg()).re();
        let (mut a, mut b) = (0.5, 4.0);
        assert!(f(a) > 0.0 && f(b) < 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m
            } else {
                b = m
            }
        }
        let root = if f(a).abs() < f(b).abs() { a } else { b };
        assert!(f(root).abs() < TAN_POLE_THRESHOLD);
        assert_eq!(tan_q(r(root), q, &cfg()).status, EvalStatus::Pole);
    }
}
