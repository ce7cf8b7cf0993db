use std::fmt;

use crate::error::{QError, Result};

/// Which side of the classical point `q = 1` a parameter lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SubOne,
    One,
    SuperOne,
}

/// A validated deformation parameter `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam {
    q: f64,
    regime: Regime,
}

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(QError::InvalidQ(q));
        }
        let regime = if q < 1.0 {
            Regime::SubOne
        } else if q > 1.0 {
            Regime::SuperOne
        } else {
            Regime::One
        };
        Ok(Self { q, regime })
    }

    /// The classical point `q = 1`.
    pub fn one() -> Self {
        Self {
            q: 1.0,
            regime: Regime::One,
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.q
    }

    #[inline]
    pub fn regime(self) -> Regime {
        self.regime
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.regime == Regime::One
    }

    /// The dual parameter `1/q`.
    pub fn inverse(self) -> Self {
        // 1/q of a positive finite double can only overflow for subnormal q.
        Self::new(1.0 / self.q).unwrap_or(self)
    }

    /// Maps `q > 1` onto `1/q`; leaves `q ≤ 1` unchanged.
    pub fn reduced(self) -> Self {
        match self.regime {
            Regime::SuperOne => self.inverse(),
            _ => self,
        }
    }
}

impl TryFrom<f64> for QParam {
    type Error = QError;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)
    }
}
