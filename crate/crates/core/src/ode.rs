//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 2_000_000 }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates `y' = f(x, y)` from `x0` and reports the state at every point of
/// `xs` (monotone in the direction of integration).
pub fn integrate<F>(mut f: F, x0: f64, y0: &[Complex64], xs: &[f64], opts: OdeOptions) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut x = x0;
    let mut out = Vec::with_capacity(xs.len());
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut h = 0.0_f64;
    let mut steps = 0usize;
    f(x, &y, &mut k[0]);

    for &target in xs {
        let dir = (target - x).signum();
        if h == 0.0 || h.signum() != dir {
            let span = (target - x).abs().max(1e-3);
            h = dir * span.min(1e-2);
        }
        while (target - x) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Stiff(format!("step budget exhausted at x = {x}")));
            }
            let last = (x + h - target) * dir >= 0.0;
            let hs = if last { target - x } else { h };
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..s {
                        acc += k[j][i] * A[s][j];
                    }
                    tmp[i] = y[i] + acc * hs;
                }
                f(x + C[s] * hs, &tmp, &mut k[s]);
            }
            // tmp now holds the 5th-order solution (FSAL stage).
            let mut err = 0.0;
            for i in 0..n {
                let mut e = Complex64::new(0.0, 0.0);
                for j in 0..7 {
                    e += k[j][i] * E[j];
                }
                let sc = opts.atol + opts.rtol * y[i].norm().max(tmp[i].norm());
                err += (e.norm() * hs.abs() / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Stiff(format!("non-finite state near x = {x}")));
            }
            if err <= 1.0 {
                x = if last { target } else { x + hs };
                y.copy_from_slice(&tmp);
                let k6 = k[6].clone();
                k[0] = k6;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            let fac = if err > 1.0 { fac.min(1.0) } else { fac };
            let hn = hs * fac;
            if !(last && err <= 1.0) {
                h = hn;
            }
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                return Err(Error::Stiff(format!("step size underflow at x = {x}")));
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotating_exponential() {
        let w = Complex64::new(-0.1, 3.0);
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let sol =
            integrate(|_, y, d| d[0] = w * y[0], 0.0, &[Complex64::new(1.0, 0.0)], &xs, OdeOptions::default()).unwrap();
        for (x, y) in xs.iter().zip(&sol) {
            assert!((y[0] - (w * x).exp()).norm() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let xs = [-1.0, -3.0];
        let sol = integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            0.0,
            &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            &xs,
            OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() },
        )
        .unwrap();
        assert!((sol[1][0].re - (-3.0f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn blow_up_is_reported() {
        let r =
            integrate(|_, y, d| d[0] = y[0] * y[0], 0.0, &[Complex64::new(1.0, 0.0)], &[2.0], OdeOptions::default());
        assert!(matches!(r, Err(Error::Stiff(_))));
    }
}
