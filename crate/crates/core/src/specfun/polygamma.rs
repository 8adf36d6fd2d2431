//! Polygamma functions ψ⁽ⁿ⁾(z), n ≥ 1, for complex argument.

use crate::error::{Error, Result};
use num_complex::Complex64;

// B_{2k} for k = 1..=12.
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

const SHIFT_TO: f64 = 20.0;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Polygamma ψ⁽ⁿ⁾(z) for `n ≥ 1`.
///
/// Upward recurrence `ψ⁽ⁿ⁾(z) = ψ⁽ⁿ⁾(z+1) − (−1)ⁿ n!/z^{n+1}` moves the argument
/// to `Re z ≥ 20`, where the Bernoulli asymptotic series converges to full
/// double precision. Non-positive integers are poles.
pub fn polygamma(n: u32, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("polygamma order must be ≥ 1 (digamma not provided)".into()));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Domain(format!("polygamma pole at z = {}", z.re)));
    }
    let nf = factorial(n);
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 }; // (−1)^{n+1}
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    let shift = if w.re < SHIFT_TO { (SHIFT_TO - w.re).ceil() as i64 } else { 0 };
    if shift > 50_000_000 {
        return Err(Error::Domain(format!("argument {z} too far along the negative axis")));
    }
    for _ in 0..shift {
        acc += w.powi(-(n as i32 + 1));
        w += 1.0;
    }
    acc *= nf;

    // (−1)^{n+1} [ (n−1)!/wⁿ + n!/(2w^{n+1}) + Σ B_{2k} (2k+n−1)!/((2k)! w^{2k+n}) ]
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut tail = Complex64::new(factorial(n - 1), 0.0) + inv * (0.5 * nf);
    let mut p = inv2;
    // (2k+n−1)!/(2k)! updated incrementally
    let mut ratio = nf / 2.0; // k = 1: (n+1)!/2!
    ratio *= (n + 1) as f64;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = k as u32 + 1;
        if k > 1 {
            let m = 2 * k + n - 1;
            ratio *= ((m - 1) * m) as f64 / ((2 * k - 1) * (2 * k)) as f64;
        }
        let term = p * (b * ratio);
        tail += term;
        if term.norm() < 1e-18 * tail.norm() {
            break;
        }
        p *= inv2;
    }
    let asym = tail * inv.powi(n as i32);
    Ok((asym + acc) * sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Direct sum ψ⁽ⁿ⁾(z) = (−1)^{n+1} n! Σ_{j≥0} (z+j)^{−n−1}, with the tail
    // beyond J replaced by its Euler–Maclaurin estimate.
    fn oracle(n: u32, z: Complex64) -> Complex64 {
        let big_j = 4000;
        let p = n as i32 + 1;
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..big_j {
            s += (z + j as f64).powi(-p);
        }
        let a = z + big_j as f64;
        // ∫_a^∞ x^{-p} + f(a)/2 − f'(a)/12 + f'''(a)/720
        let pf = p as f64;
        s += a.powi(1 - p) / (pf - 1.0) + a.powi(-p) * 0.5 + a.powi(-p - 1) * (pf / 12.0)
            - a.powi(-p - 3) * (pf * (pf + 1.0) * (pf + 2.0) / 720.0);
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        s * factorial(n) * sign
    }

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn values_at_one() {
        let t = polygamma(3, Complex64::new(1.0, 0.0)).unwrap();
        assert!((t.re - PI.powi(4) / 15.0).abs() < 1e-13);
        let s = polygamma(2, Complex64::new(1.0, 0.0)).unwrap();
        assert!((s.re + 2.0 * ZETA3).abs() < 1e-13);
    }

    #[test]
    fn matches_direct_sum() {
        for &(x, y) in &[(0.3, 0.0), (1.5, 2.0), (-2.5, 0.7), (7.0, -3.0), (0.02, 0.0), (45.0, 10.0)] {
            let z = Complex64::new(x, y);
            for n in 1..=4 {
                let a = polygamma(n, z).unwrap();
                let b = oracle(n, z);
                assert!((a - b).norm() <= 1e-12 * b.norm(), "n={n} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn recurrence_and_reflection_symmetry() {
        let z = Complex64::new(0.37, 1.3);
        let lhs = polygamma(2, z + 1.0).unwrap();
        let rhs = polygamma(2, z).unwrap() + z.powi(-3) * 2.0;
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
        let c = polygamma(3, z.conj()).unwrap();
        assert!((c - polygamma(3, z).unwrap().conj()).norm() < 1e-15 * c.norm());
    }

    #[test]
    fn poles_are_domain_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(polygamma(2, Complex64::new(x, 0.0)), Err(Error::Domain(_))));
        }
        assert!(polygamma(2, Complex64::new(-1.0, 1e-3)).is_ok());
    }
}
