//! Uniform-grid evaluation of a single function, the data behind CSV sweeps.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::par::{map_ordered, Execution};
use crate::param::QParam;
use crate::qexp::{self, EvalConfig, EvalStatus, Method};
use crate::qtrig;

/// Functions that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFunction {
    SmallExp,
    BigExp,
    CalE,
    SinQ,
    CosQ,
    BigSinQ,
    BigCosQ,
    TanQ,
    CalSin,
    CalCos,
}

impl SweepFunction {
    pub const ALL: [SweepFunction; 10] = [
        SweepFunction::SmallExp,
        SweepFunction::BigExp,
        SweepFunction::CalE,
        SweepFunction::SinQ,
        SweepFunction::CosQ,
        SweepFunction::BigSinQ,
        SweepFunction::BigCosQ,
        SweepFunction::TanQ,
        SweepFunction::CalSin,
        SweepFunction::CalCos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepFunction::SmallExp => "eq",
            SweepFunction::BigExp => "Eq",
            SweepFunction::CalE => "calE",
            SweepFunction::SinQ => "sin_q",
            SweepFunction::CosQ => "cos_q",
            SweepFunction::BigSinQ => "Sin_q",
            SweepFunction::BigCosQ => "Cos_q",
            SweepFunction::TanQ => "tan_q",
            SweepFunction::CalSin => "calSin",
            SweepFunction::CalCos => "calCos",
        }
    }

    /// Evaluates the function at `z`.
    pub fn evaluate(self, z: Complex64, q: QParam, cfg: &EvalConfig) -> Evaluation {
        use SweepFunction::*;
        let trig = |t: qtrig::TrigValue| Evaluation {
            value: t.value,
            terms_used: None,
            err_estimate: None,
            status: t.status,
            imag_residue: Some(t.imag_residue),
        };
        match self {
            SmallExp | BigExp | CalE => {
                let r = match self {
                    SmallExp => qexp::eq_small(z, q, cfg),
                    BigExp => qexp::eq_big(z, q, cfg),
                    _ => qexp::cal_e(z, q, cfg),
                };
                Evaluation {
                    value: r.value,
                    terms_used: Some(r.terms_used),
                    err_estimate: Some(r.err_estimate),
                    status: r.status,
                    imag_residue: None,
                }
            }
            SinQ => trig(qtrig::sin_q(z, q, cfg)),
            CosQ => trig(qtrig::cos_q(z, q, cfg)),
            BigSinQ => trig(qtrig::big_sin_q(z, q, cfg)),
            BigCosQ => trig(qtrig::big_cos_q(z, q, cfg)),
            TanQ => trig(qtrig::tan_q(z, q, cfg)),
            CalSin => trig(qtrig::cal_sin(z, q, cfg)),
            CalCos => trig(qtrig::cal_cos(z, q, cfg)),
        }
    }
}

impl fmt::Display for SweepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepFunction {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| QError::Domain(format!("unknown function `{s}`")))
    }
}

/// A single point evaluation with whatever diagnostics the function offers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    /// Terms or factors used (exponentials only).
    pub terms_used: Option<usize>,
    pub err_estimate: Option<f64>,
    pub status: EvalStatus,
    /// Pre-truncation imaginary part (trigonometric functions only).
    pub imag_residue: Option<f64>,
}

/// Whether the swept variable is the real argument `x` or `i·x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    RealAxis,
    ImagAxis,
}

impl FromStr for SweepVar {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x_real" => Ok(SweepVar::RealAxis),
            "x_imag_axis" => Ok(SweepVar::ImagAxis),
            other => Err(QError::Domain(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub function: SweepFunction,
    pub q: QParam,
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub method: Method,
    pub rel_tol: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(QError::Domain(format!(
                "sweep needs finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(QError::Domain(format!(
                "sweep needs at least 2 steps, got {}",
                self.steps
            )));
        }
        self.config().validate()
    }

    pub fn config(&self) -> EvalConfig {
        EvalConfig {
            rel_tol: self.rel_tol,
            method: self.method,
            ..EvalConfig::default()
        }
    }

    /// Grid abscissae; both endpoints are hit exactly.
    pub fn abscissae(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x: f64,
    pub eval: Evaluation,
}

/// Evaluates the sweep; rows come back in grid order for either execution.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let cfg = spec.config();
    let xs = spec.abscissae();
    Ok(map_ordered(&xs, exec, |&x| {
        let z = match spec.var {
            SweepVar::RealAxis => Complex64::new(x, 0.0),
            SweepVar::ImagAxis => Complex64::new(0.0, x),
        };
        SweepRow {
            x,
            eval: spec.function.evaluate(z, spec.q, &cfg),
        }
    }))
}

pub const CSV_HEADER: &str = "x,value_re,value_im,terms,err_estimate,status";

/// Writes rows as CSV with shortest round-trip number formatting.
///
/// Rows that did not converge keep `x` and `status` and leave the value
/// fields empty.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let e = &row.eval;
        let terms = e.terms_used.map(|t| t.to_string()).unwrap_or_default();
        if e.status == EvalStatus::Converged {
            let err = e.err_estimate.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.x, e.value.re, e.value.im, terms, err, e.status
            )?;
        } else {
            writeln!(out, "{},,,{},,{}", row.x, terms, e.status)?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(function: SweepFunction, var: SweepVar, steps: usize) -> SweepSpec {
        SweepSpec {
            function,
            q: QParam::new(0.5).unwrap(),
            var,
            start: 0.0,
            stop: 10.0,
            steps,
            method: Method::Auto,
            rel_tol: 1e-14,
        }
    }

    #[test]
    fn endpoints_and_count() {
        let s = spec(SweepFunction::CalCos, SweepVar::RealAxis, 2);
        assert_eq!(s.abscissae(), vec![0.0, 10.0]);
        let s = spec(SweepFunction::CalCos, SweepVar::RealAxis, 101);
        let xs = s.abscissae();
        assert_eq!(xs.len(), 101);
        assert_eq!(xs[100], 10.0);
        assert!((xs[37] - 3.7).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(SweepFunction::CalE, SweepVar::ImagAxis, 1);
        assert!(s.validate().is_err());
        s.steps = 5;
        s.start = 11.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn names_round_trip() {
        for f in SweepFunction::ALL {
            assert_eq!(f.name().parse::<SweepFunction>().unwrap(), f);
        }
        assert!("exp".parse::<SweepFunction>().is_err());
    }

    #[test]
    fn non_converged_rows_have_empty_values() {
        let s = SweepSpec {
            start: 3.0,
            stop: 5.0,
            steps: 3,
            method: Method::Product,
            ..spec(SweepFunction::CalE, SweepVar::RealAxis, 3)
        };
        let rows = run_sweep(&s, Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[2], "4,,,0,,Pole");
        assert!(lines[1].ends_with(",Converged"));
    }
}
