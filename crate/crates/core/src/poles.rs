//! Analytic structure of the zero-data propagator
//! `U(k) = ĝ₀ − (1 − ĝ₀²)ĝ₀e^{−2iωt}/(1 − ĝ₀²e^{−2iωt})` in units `g = 1`.
//!
//! With `k = sinh η`, `ĝ₀ = −e^{−2η}` and the denominator vanishes where
//! `F(η) = (t/2) sinh 2η − 2iη − mπ = 0`, `m = ±1, ±2, …`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const MAX_NEWTON: usize = 100;
/// Accepted `|F(η)|` at a root.
pub const RESIDUAL_TOL: f64 = 1e-10;
const SINGULAR_DENOMINATOR: f64 = 1e-13;

/// `S = sin(ωt)/(2ω)` and `cos(ωt)` as functions of `w = ω²` (both even in ω,
/// hence entire in `w`).
fn s_and_c(w: Complex64, t: f64) -> (Complex64, Complex64) {
    let om = w.sqrt();
    let x = om * t;
    if x.norm() < 1e-3 {
        // sin x/x and cos x by their Taylor series in x²
        let x2 = x * x;
        let sinc = 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
        let cos = 1.0 - x2 / 2.0 * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0));
        (sinc * (t / 2.0), cos)
    } else {
        (x.sin() / (2.0 * om), x.cos())
    }
}

/// `U(k) = −iS/(i(2k² + 1)S + cos ωt)`, regular at the branch points of ω.
pub fn u_eval(k: Complex64, t: f64) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("need t ≥ 0, got {t}")));
    }
    let k2 = k * k;
    let (s, c) = s_and_c(k2 * (k2 + 1.0), t);
    let den = Complex64::i() * (2.0 * k2 + 1.0) * s + c;
    if den.norm() < SINGULAR_DENOMINATOR {
        let eta = k.asinh();
        let m = ((eta * 2.0).sinh() * (t / 2.0) - Complex64::i() * 2.0 * eta) / PI;
        return Err(Error::Singular(format!("U has a pole at k = {k} (nearest index m ≈ {:.0})", m.re)));
    }
    Ok(-Complex64::i() * s / den)
}

/// A simple pole of `U`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleRecord {
    pub m: i64,
    pub eta: Complex64,
    /// `k = sinh η`.
    pub k: Complex64,
    /// `|F(η)|`.
    pub residual: f64,
    /// `|F′(η)|`; nonzero for a simple pole.
    pub derivative: f64,
    pub iterations: usize,
}

/// Per-index failure; other indices are unaffected.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleFailure {
    pub m: i64,
    pub error: Error,
}

fn f_and_df(eta: Complex64, t: f64, m: i64) -> (Complex64, Complex64) {
    let two = eta * 2.0;
    let f = two.sinh() * (t / 2.0) - Complex64::i() * two - m as f64 * PI;
    let df = two.cosh() * t - Complex64::new(0.0, 2.0);
    (f, df)
}

/// Leading-order root: `mπ/(t − 2i)` for `|m|π ≤ t`, otherwise
/// `½ sg(m)(1 + i/(|m|π)) ln(4|m|π/t)`.
pub fn pole_estimate(m: i64, t: f64) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::Domain("pole index m must be nonzero".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    let mp = m.unsigned_abs() as f64 * PI;
    let sg = m.signum() as f64;
    Ok(if mp <= t {
        Complex64::new(m as f64 * PI, 0.0) / Complex64::new(t, -2.0)
    } else {
        Complex64::new(1.0, 1.0 / mp) * (0.5 * sg * (4.0 * mp / t).ln())
    })
}

/// Newton refinement of the m-th root from [`pole_estimate`], with
/// step halving on residual growth.
pub fn refine_pole(m: i64, t: f64) -> Result<PoleRecord> {
    let mut eta = pole_estimate(m, t)?;
    let (mut f, mut df) = f_and_df(eta, t, m);
    let scale = 1.0 + m.unsigned_abs() as f64 * PI;
    for it in 1..=MAX_NEWTON {
        if df.norm() == 0.0 {
            return Err(Error::Solver(format!("F′ vanished at η = {eta}")));
        }
        let step = f / df;
        let mut lam = 1.0;
        let (mut next, mut fn_, mut dfn);
        loop {
            next = eta - step * lam;
            (fn_, dfn) = f_and_df(next, t, m);
            if fn_.norm() < f.norm() || lam < 1e-6 {
                break;
            }
            lam *= 0.5;
        }
        eta = next;
        f = fn_;
        df = dfn;
        if f.norm() <= 1e-15 * scale || step.norm() * lam <= 1e-16 * eta.norm() {
            return admissible(m, t, eta, f, df, it);
        }
    }
    Err(Error::Solver(format!("Newton did not converge in {MAX_NEWTON} iterations (|F| = {:.3e})", f.norm())))
}

fn admissible(m: i64, t: f64, eta: Complex64, f: Complex64, df: Complex64, iterations: usize) -> Result<PoleRecord> {
    let _ = t;
    let residual = f.norm();
    if residual >= RESIDUAL_TOL {
        return Err(Error::Solver(format!("root residual {residual:.3e} above {RESIDUAL_TOL:.0e}")));
    }
    if !(eta.im > -FRAC_PI_2 && eta.im <= FRAC_PI_2) {
        return Err(Error::Solver(format!("root η = {eta} left the strip −π/2 < Im η ≤ π/2")));
    }
    if eta.re * eta.im <= 0.0 {
        return Err(Error::Solver(format!("root η = {eta} is not in the first or third quadrant")));
    }
    Ok(PoleRecord { m, eta, k: eta.sinh(), residual, derivative: df.norm(), iterations })
}

/// Poles for every nonzero `m` in `m_range`, in order.
pub fn find_poles(
    t: f64,
    m_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<std::result::Result<PoleRecord, PoleFailure>>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("need t > 0, got {t}")));
    }
    if m_range.contains(&0) && m_range.clone().count() == 1 {
        return Err(Error::Domain("m = 0 is not a pole index".into()));
    }
    Ok(m_range.filter(|&m| m != 0).map(|m| refine_pole(m, t).map_err(|error| PoleFailure { m, error })).collect())
}
