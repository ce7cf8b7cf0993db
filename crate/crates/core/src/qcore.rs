//! Combinatorial building blocks of q-calculus and the two difference
//! operators built on the geometric grid `{z, qz}`.
//!
//! Every bracket has an exact branch at `q = 1` (`[n] = n`), so no formula
//! here is ever evaluated as a `0/0` limit.

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::param::QParam;

/// Up to this order `[n]` is summed term by term; beyond it the closed form
/// `(1 - q^n)/(1 - q)` is used.
const EXPLICIT_SUM_MAX: u32 = 64;

/// The q-bracket `[n] = 1 + q + … + q^{n-1}`.
pub fn q_bracket(n: u32, q: QParam) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let q = q.value();
    if q == 1.0 {
        return n as f64;
    }
    if n <= EXPLICIT_SUM_MAX {
        // Horner: 1 + q(1 + q(1 + …))
        (1..n).fold(1.0, |acc, _| acc.mul_add(q, 1.0))
    } else {
        (1.0 - q.powi(n as i32)) / (1.0 - q)
    }
}

/// The tilde bracket `[ñ] = 1 + 1/q + … + 1/q^{n-1}`, i.e. `[n]` at `1/q`.
pub fn q_bracket_tilde(n: u32, q: QParam) -> f64 {
    q_bracket(n, q.inverse())
}

/// The improved bracket `{n} = [n] / (½(1 + q^{n-1}))`.
///
/// Equal to `2(1-q^n)/((1-q)(1+q^{n-1}))` away from `q = 1` and to `n` at
/// `q = 1`. It is invariant under `q ↦ 1/q`, which is used as a fallback
/// when `q^{n-1}` leaves the floating-point range.
pub fn brace_bracket(n: u32, q: QParam) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if q.is_one() {
        return n as f64;
    }
    let half_norm = 0.5 * (1.0 + q.value().powi(n as i32 - 1));
    let value = q_bracket(n, q) / half_norm;
    if value.is_finite() {
        value
    } else {
        let p = q.inverse();
        q_bracket(n, p) / (0.5 * (1.0 + p.value().powi(n as i32 - 1)))
    }
}

/// Selects which bracket a [`q_factorial`] multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorialKind {
    /// `[n]! = [1][2]…[n]`
    Plain,
    /// `[ñ]! = [1̃][2̃]…[ñ]`
    Tilde,
    /// `{n}! = {1}{2}…{n}`
    Brace,
}

/// Product of the chosen bracket over `1..=n`; the empty product is 1.
///
/// Returns [`QError::Overflow`] when the product leaves the `f64` range.
pub fn q_factorial(n: u32, q: QParam, kind: FactorialKind) -> Result<f64> {
    let bracket = match kind {
        FactorialKind::Plain => q_bracket,
        FactorialKind::Tilde => q_bracket_tilde,
        FactorialKind::Brace => brace_bracket,
    };
    let mut acc = 1.0_f64;
    for k in 1..=n {
        acc *= bracket(k, q);
        if !acc.is_finite() {
            return Err(QError::Overflow { n });
        }
    }
    Ok(acc)
}

/// Gaussian binomial coefficient `[n]! / ([j]! [n-j]!)`.
///
/// Evaluated as a running product of bracket ratios so intermediate
/// factorials never overflow.
pub fn gauss_binomial(n: u32, j: i64, q: QParam) -> Result<f64> {
    if j < 0 || j > n as i64 {
        return Err(QError::Domain(format!(
            "gauss_binomial needs 0 <= j <= n, got n = {n}, j = {j}"
        )));
    }
    let j = j as u32;
    let k = j.min(n - j);
    Ok((1..=k).fold(1.0, |acc, i| {
        acc * q_bracket(n - k + i, q) / q_bracket(i, q)
    }))
}

/// `Σ_{j=0}^{n} q^{j(j-1)/2} [n choose j]_q`, the special case of the
/// Gauss binomial formula that equals `(1+1)(1+q)…(1+q^{n-1})`.
pub fn gauss_binomial_sum(n: u32, q: QParam) -> f64 {
    let qv = q.value();
    (0..=n)
        .map(|j| {
            let weight = qv.powf(j as f64 * (j as f64 - 1.0) / 2.0);
            // j is in range by construction
            weight * gauss_binomial(n, j as i64, q).unwrap_or(f64::NAN)
        })
        .sum()
}

/// The Jackson q-derivative `(f(qz) - f(z)) / (qz - z)`.
///
/// Undefined at `q = 1` and at `z = 0`, where the quotient degenerates.
pub fn jackson_derivative<F>(f: F, z: Complex64, q: QParam) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    try_jackson_derivative(|w| Ok(f(w)), z, q)
}

/// Like [`jackson_derivative`] for functions whose evaluation may fail.
pub fn try_jackson_derivative<F>(f: F, z: Complex64, q: QParam) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if q.is_one() {
        return Err(QError::Domain(
            "the Jackson derivative is degenerate at q = 1".into(),
        ));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(QError::Domain(
            "the Jackson derivative is degenerate at z = 0".into(),
        ));
    }
    let qz = z * q.value();
    Ok((f(qz)? - f(z)?) / (qz - z))
}

/// The averaging operator `⟨f⟩(z) = (f(z) + f(qz)) / 2`.
pub fn average_operator<F>(f: F, z: Complex64, q: QParam) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    0.5 * (f(z) + f(z * q.value()))
}

/// Like [`average_operator`] for functions whose evaluation may fail.
pub fn try_average_operator<F>(f: F, z: Complex64, q: QParam) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(0.5 * (f(z)? + f(z * q.value())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParam {
        QParam::new(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    // Brute-force oracles: plain powers, no Horner, no closed forms.
    fn bracket_oracle(n: u32, q: f64) -> f64 {
        (0..n).map(|k| q.powi(k as i32)).sum()
    }

    fn factorial_oracle(n: u32, q: f64) -> f64 {
        (1..=n).map(|k| bracket_oracle(k, q)).product()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(q_bracket(3, qp(1.0)), 3.0);
        assert_eq!(q_bracket(0, qp(0.5)), 0.0);
        assert_eq!(q_bracket(3, qp(2.0)), 7.0);
        assert_eq!(q_bracket(1, qp(0.37)), 1.0);
    }

    #[test]
    fn bracket_closed_form_branch_matches_sum() {
        for q in [0.3, 0.9, 0.999, 1.001] {
            for n in [65, 80, 100] {
                assert!(
                    rel(q_bracket(n, qp(q)), bracket_oracle(n, q)) < 1e-12,
                    "q={q} n={n}"
                );
            }
        }
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(q_bracket_tilde(2, qp(2.0)), 1.5);
        assert_eq!(q_bracket_tilde(2, qp(1.0)), 2.0);
        assert_eq!(q_bracket_tilde(3, qp(0.5)), 7.0);
    }

    #[test]
    fn brace_examples() {
        for q in [0.1, 0.5, 1.0, 2.0, 7.0] {
            assert_eq!(brace_bracket(1, qp(q)), 1.0);
        }
        assert_eq!(brace_bracket(2, qp(7.0)), 2.0);
        assert!((brace_bracket(3, qp(2.0)) - 2.8).abs() < 1e-15);
        assert_eq!(brace_bracket(5, qp(1.0)), 5.0);
    }

    #[test]
    fn brace_survives_large_orders() {
        let b = brace_bracket(2000, qp(5.0));
        assert!((b - 2.5).abs() < 1e-12, "{b}");
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(q_factorial(0, qp(0.5), FactorialKind::Plain).unwrap(), 1.0);
        assert_eq!(q_factorial(3, qp(2.0), FactorialKind::Plain).unwrap(), 21.0);
        assert_eq!(
            q_factorial(3, qp(2.0), FactorialKind::Tilde).unwrap(),
            2.625
        );
        assert_eq!(q_factorial(4, qp(1.0), FactorialKind::Brace).unwrap(), 24.0);
    }

    #[test]
    fn factorial_overflow_is_reported() {
        let err = q_factorial(200, qp(5.0), FactorialKind::Plain).unwrap_err();
        assert!(matches!(err, QError::Overflow { .. }));
    }

    #[test]
    fn factorial_matches_oracle() {
        for q in [0.3, 0.5, 2.0, 5.0] {
            for n in 0..=20 {
                let got = q_factorial(n, qp(q), FactorialKind::Plain).unwrap();
                assert!(rel(got, factorial_oracle(n, q)) < 1e-13, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn gauss_binomial_examples() {
        assert_eq!(gauss_binomial(4, 0, qp(0.7)).unwrap(), 1.0);
        assert_eq!(gauss_binomial(2, 1, qp(2.0)).unwrap(), 3.0);
        // [4]!/([2]!)^2 at q = 0.5 by direct products
        let want = factorial_oracle(4, 0.5) / factorial_oracle(2, 0.5).powi(2);
        assert!(rel(gauss_binomial(4, 2, qp(0.5)).unwrap(), want) < 1e-15);
        assert!(gauss_binomial(3, 4, qp(0.5)).is_err());
        assert!(gauss_binomial(3, -1, qp(0.5)).is_err());
    }

    #[test]
    fn gauss_binomial_is_symmetric() {
        for q in [0.3, 2.0] {
            for n in 0..12u32 {
                for j in 0..=n {
                    let a = gauss_binomial(n, j as i64, qp(q)).unwrap();
                    let b = gauss_binomial(n, (n - j) as i64, qp(q)).unwrap();
                    assert!(rel(a, b) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        assert_eq!(gauss_binomial_sum(0, qp(0.5)), 1.0);
        assert!((gauss_binomial_sum(2, qp(2.0)) - 6.0).abs() < 1e-14);
        // brute force: four terms 1 + [3] + q[3] + q^3, with [3]_{0.5} = 1.75
        let brute = 1.0 + 1.75 + 0.5 * 1.75 + 0.125;
        assert!((gauss_binomial_sum(3, qp(0.5)) - brute).abs() < 1e-15);
        assert!((brute - 3.75_f64).abs() < 1e-15);
    }

    #[test]
    fn jackson_examples() {
        let z = Complex64::new(0.3, -1.2);
        let d = jackson_derivative(|w| w, z, qp(2.0)).unwrap();
        assert!((d - 1.0).norm() < 1e-15);
        let d = jackson_derivative(|w| w * w, Complex64::new(1.0, 0.0), qp(2.0)).unwrap();
        assert_eq!(d, Complex64::new(3.0, 0.0));
        assert!(jackson_derivative(|w| w, z, qp(1.0)).is_err());
        assert!(jackson_derivative(|w| w, Complex64::new(0.0, 0.0), qp(2.0)).is_err());
    }

    #[test]
    fn average_examples() {
        let c = Complex64::new(2.5, -1.0);
        assert_eq!(
            average_operator(|_| c, Complex64::new(7.0, 1.0), qp(0.3)),
            c
        );
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(
            average_operator(|w| w, one, qp(3.0)),
            Complex64::new(2.0, 0.0)
        );
        assert_eq!(
            average_operator(|w| w * w, one, qp(2.0)),
            Complex64::new(2.5, 0.0)
        );
    }
}
