//! ₁F₂(1; b₁, b₂; z) by its power series, summed in double-double.

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_TERMS: usize = 10_000;
/// Largest tolerated ratio max|term| / |sum| (≈ digits lost to cancellation).
const MAX_CANCELLATION: f64 = 1e16;

/// Lower parameter, kept exact: either a rational `p/q` or a binary64 value.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Param {
    Rational(i64, i64),
    Float(f64),
}

impl Param {
    /// Detects small-denominator rationals so that e.g. `4/3` is used exactly.
    pub fn from_f64(b: f64) -> Param {
        for q in 1..=64i64 {
            let p = (b * q as f64).round();
            if (b * q as f64 - p).abs() < 1e-12 * (1.0 + p.abs()) {
                return Param::Rational(p as i64, q);
            }
        }
        Param::Float(b)
    }

    fn value(self) -> f64 {
        match self {
            Param::Rational(p, q) => p as f64 / q as f64,
            Param::Float(b) => b,
        }
    }

    fn is_nonpositive_integer(self) -> bool {
        match self {
            Param::Rational(p, q) => p <= 0 && p % q == 0,
            Param::Float(b) => b <= 0.0 && b == b.round(),
        }
    }

    /// `k + b` in double-double.
    fn shifted(self, k: usize) -> Dd {
        match self {
            Param::Rational(p, q) => Dd::from_f64((k as i64 * q + p) as f64).div_f64(q as f64),
            Param::Float(b) => Dd::from_f64(k as f64) + Dd::from_f64(b),
        }
    }
}

/// Series for ₁F₂(1; b₁, b₂; z) with `z` given in double-double.
pub(crate) fn hyp1f2_dd(b1: Param, b2: Param, z: CDd) -> Result<Complex64> {
    if b1.is_nonpositive_integer() || b2.is_nonpositive_integer() {
        return Err(Error::Domain(format!(
            "1F2 lower parameter is a non-positive integer ({}, {})",
            b1.value(),
            b2.value()
        )));
    }
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut biggest = 1.0_f64;
    let mut prev = 1.0_f64;
    for k in 0..MAX_TERMS {
        let den = b1.shifted(k) * b2.shifted(k);
        term = (term * z).div_real(den);
        sum = sum + term;
        let t = term.norm_hi();
        biggest = biggest.max(t);
        let s = sum.norm_hi();
        if t < prev && t <= 1e-22 * s.max(f64::MIN_POSITIVE) {
            if biggest > MAX_CANCELLATION * s {
                return Err(Error::Accuracy(format!(
                    "1F2 series lost too many digits (max term {biggest:.3e}, sum {s:.3e})"
                )));
            }
            return Ok(sum.to_c64());
        }
        if t == 0.0 {
            return Ok(sum.to_c64());
        }
        prev = t;
    }
    Err(Error::Accuracy(format!("1F2 series did not converge in {MAX_TERMS} terms")))
}

/// ₁F₂(1; b₁, b₂; z). Terms are accumulated in double-double arithmetic so the
/// result keeps full double precision for `|z| ≲ 100` despite cancellation.
pub fn hyp1f2(b1: f64, b2: f64, z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite() && b1.is_finite() && b2.is_finite()) {
        return Err(Error::Domain("non-finite 1F2 argument".into()));
    }
    hyp1f2_dd(Param::from_f64(b1), Param::from_f64(b2), CDd::from_c64(z))
}
