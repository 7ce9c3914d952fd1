use std::fmt;
use std::sync::Arc;

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// A real number kept in a form that can be re-evaluated at any precision.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactReal {
    Value(f64),
    /// `1 / n`
    Reciprocal(u64),
    /// `base^exp`
    PowerOf {
        base: f64,
        exp: u32,
    },
    Big(Arc<Float>),
}

impl ExactReal {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactReal::Value(v) => *v,
            ExactReal::Reciprocal(n) => 1.0 / *n as f64,
            ExactReal::PowerOf { base, exp } => {
                if *exp <= i32::MAX as u32 {
                    base.powi(*exp as i32)
                } else {
                    0.0
                }
            }
            ExactReal::Big(f) => f.to_f64(),
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            ExactReal::Value(v) => Float::with_val(prec, *v),
            ExactReal::Reciprocal(n) => Float::with_val(prec, 1) / *n,
            ExactReal::PowerOf { base, exp } => Float::with_val(prec, *base).pow(*exp),
            ExactReal::Big(f) => Float::with_val(prec, &**f),
        }
    }

    pub fn neg(&self) -> ExactReal {
        match self {
            ExactReal::Big(f) => ExactReal::Big(Arc::new(-(**f).clone())),
            other => ExactReal::Value(-other.to_f64()),
        }
    }
}

/// Increasing parameters `a_n` in `[0, 1)` with `a_0 = 0`, stored through
/// `ε_n = 1 - a_n` so that values near 1 keep full relative accuracy.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSequence {
    /// `ε_n = 1 / (n + offset)`, with `ε_n = 1` whenever `n + offset <= 1`.
    OneMinusReciprocal { offset: u64 },
    /// `ε_n = q^n`.
    Geometric { q: f64 },
    /// Explicit `a_0, a_1, ...`; the last value repeats past the end.
    Explicit { values: Arc<Vec<f64>> },
}

impl ParamSequence {
    pub fn one_minus_reciprocal() -> Self {
        ParamSequence::OneMinusReciprocal { offset: 0 }
    }

    pub fn geometric(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParam(format!("geometric ratio {q} must lie in (0, 1)")));
        }
        Ok(ParamSequence::Geometric { q })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&0.0) {
            return Err(Error::InvalidParam("explicit sequence must start with a_0 = 0".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) || values.iter().any(|v| !(0.0..1.0).contains(v)) {
            return Err(Error::InvalidParam("explicit sequence must be increasing in [0, 1)".into()));
        }
        Ok(ParamSequence::Explicit { values: Arc::new(values) })
    }

    pub fn eps(&self, n: usize) -> ExactReal {
        match self {
            ParamSequence::OneMinusReciprocal { offset } => {
                let k = n as u64 + offset;
                if n == 0 || k <= 1 {
                    ExactReal::Value(1.0)
                } else {
                    ExactReal::Reciprocal(k)
                }
            }
            ParamSequence::Geometric { q } => ExactReal::PowerOf { base: *q, exp: n as u32 },
            ParamSequence::Explicit { values } => {
                let a = values[n.min(values.len() - 1)];
                ExactReal::Value(1.0 - a)
            }
        }
    }

    pub fn a(&self, n: usize) -> f64 {
        1.0 - self.eps(n).to_f64()
    }

    pub fn a_float(&self, n: usize, prec: u32) -> Float {
        1 - self.eps(n).to_float(prec)
    }

    /// Parses the textual forms produced by `Display`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("unknown parameter sequence {s:?}"));
        let body = s.trim().strip_prefix("1-").ok_or_else(bad)?;
        if body == "1/n" {
            return Ok(ParamSequence::OneMinusReciprocal { offset: 0 });
        }
        if let Some(inner) = body.strip_prefix("1/(n+").and_then(|r| r.strip_suffix(')')) {
            let offset = inner.parse().map_err(|_| bad())?;
            return Ok(ParamSequence::OneMinusReciprocal { offset });
        }
        if body == "2^-n" {
            return Self::geometric(0.5);
        }
        if let Some(q) = body.strip_suffix("^n") {
            return Self::geometric(q.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }
}

impl fmt::Display for ParamSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSequence::OneMinusReciprocal { offset: 0 } => write!(f, "1-1/n"),
            ParamSequence::OneMinusReciprocal { offset } => write!(f, "1-1/(n+{offset})"),
            ParamSequence::Geometric { q } if *q == 0.5 => write!(f, "1-2^-n"),
            ParamSequence::Geometric { q } => write!(f, "1-{q}^n"),
            ParamSequence::Explicit { values } => write!(f, "explicit[{}]", values.len()),
        }
    }
}

/// Half-plane multiplier of the Joukowski family, `(n + 1 + sqrt(n^2 + 2n)) / n`.
pub fn hp_multiplier(n: usize) -> f64 {
    let n = n as f64;
    (n + 1.0 + (n * n + 2.0 * n).sqrt()) / n
}

pub fn hp_multiplier_float(n: usize, prec: u32) -> Float {
    let nf = Float::with_val(prec, n);
    let disc = Float::with_val(prec, &nf * &nf) + Float::with_val(prec, 2 * n as u64);
    (Float::with_val(prec, &nf + 1u32) + disc.sqrt()) / nf
}
