//! Thin wrapper over `complex-bessel` with the conventions used here:
//! principal branches, `z = 0` rejected for the singular kinds.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    H1,
    H2,
    K,
}

fn lift(
    r: std::result::Result<Complex64, complex_bessel::Error>,
    kind: BesselKind,
    nu: f64,
    z: Complex64,
) -> Result<Complex64> {
    match r {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
        Ok(_) => Err(Error::Accuracy(format!("{kind:?}_{nu}({z}) overflowed"))),
        Err(e) => Err(Error::Accuracy(format!("{kind:?}_{nu}({z}): {e:?}"))),
    }
}

/// Bessel-type function of order `nu ≥ 0` on the principal branch.
pub fn bessel(kind: BesselKind, nu: f64, z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) || nu < 0.0 || !nu.is_finite() {
        return Err(Error::Domain(format!("bessel {kind:?} order {nu} at {z}")));
    }
    if z == Complex64::new(0.0, 0.0) && kind != BesselKind::J {
        return Err(Error::Domain(format!("{kind:?}_{nu} is singular at the origin")));
    }
    // The backing library does not honour signed zeros on the cut; use
    // Schwarz reflection so that (x, -0) lands on the lower lip.
    if z.im == 0.0 && z.re < 0.0 && z.im.is_sign_negative() && kind != BesselKind::J {
        let up = bessel(kind.conj(), nu, Complex64::new(z.re, 0.0))?;
        return Ok(up.conj());
    }
    let r = match kind {
        BesselKind::J => complex_bessel::besselj(nu, z),
        BesselKind::Y => complex_bessel::bessely(nu, z),
        BesselKind::H1 => complex_bessel::hankel1(nu, z),
        BesselKind::H2 => complex_bessel::hankel2(nu, z),
        BesselKind::K => complex_bessel::besselk(nu, z),
    };
    lift(r, kind, nu, z)
}

impl BesselKind {
    /// Kind `K'` with `K(ν, z̄) = conj(K'(ν, z))` for real order.
    fn conj(self) -> BesselKind {
        match self {
            BesselKind::H1 => BesselKind::H2,
            BesselKind::H2 => BesselKind::H1,
            k => k,
        }
    }
}

pub fn bessel_j(nu: f64, z: Complex64) -> Result<Complex64> {
    bessel(BesselKind::J, nu, z)
}
pub fn bessel_y(nu: f64, z: Complex64) -> Result<Complex64> {
    bessel(BesselKind::Y, nu, z)
}
pub fn hankel1(nu: f64, z: Complex64) -> Result<Complex64> {
    bessel(BesselKind::H1, nu, z)
}
pub fn hankel2(nu: f64, z: Complex64) -> Result<Complex64> {
    bessel(BesselKind::H2, nu, z)
}
pub fn bessel_k(nu: f64, z: Complex64) -> Result<Complex64> {
    bessel(BesselKind::K, nu, z)
}
