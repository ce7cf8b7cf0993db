//! Quantum-calculus special functions.
//!
//! The crate provides the classical q-exponentials `e_q` and `E_q`, the
//! improved q-exponential `𝓔_q = e_q^{z/2} E_q^{z/2}` (the Cayley-type
//! product that maps the imaginary axis onto the unit circle), both families
//! of q-trigonometric functions, the Jackson q-derivative, and a numerical
//! identity checker that evaluates every known relation between them as a
//! residual over sample grids.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`qcore`] | q-brackets, q-factorials, Gauss binomials, `D_q`, `⟨·⟩` |
//! | [`qexp`] | series and product evaluators for `e_q`, `E_q`, `𝓔_q` |
//! | [`qtrig`] | `sin_q`, `cos_q`, `Sin_q`, `Cos_q`, `tan_q`, `𝒮in_q`, `𝒞os_q` |
//! | [`verify`] | identity registry, grids, residual reports |
//! | [`sweep`] | uniform-grid evaluation for CSV output |
//!
//! ```
//! use num_complex::Complex64;
//! use qcal::{qexp, EvalConfig, QParam};
//!
//! let q = QParam::new(0.5).unwrap();
//! let e = qexp::cal_e(Complex64::new(0.0, 10.0), q, &EvalConfig::default());
//! assert!((e.value.norm() - 1.0).abs() < 1e-12);
//! ```

mod dd;
pub mod error;
pub mod par;
pub mod param;
pub mod qcore;
pub mod qexp;
pub mod qtrig;
pub mod sweep;
pub mod verify;

pub use error::QError;
pub use par::Execution;
pub use param::{QParam, Regime};
pub use qexp::{EvalConfig, EvalResult, EvalStatus, Method};
pub use qtrig::TrigValue;
