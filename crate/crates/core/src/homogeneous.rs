//! Homogeneous gas: Bogoliubov dispersion, the steady pair kernel, the exact
//! time-dependent solution of the momentum-space Riccati equation and the
//! transient part Λ of the real-space kernel.

use crate::error::{finite, Error, Result};
use crate::ode::{self, OdeOptions};
use crate::quad;
use crate::specfun::{lommel_s, LommelOrder};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Scattering length `a` and background density `ρ₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasParams {
    pub a: f64,
    pub rho0: f64,
}

impl GasParams {
    pub fn new(a: f64, rho0: f64) -> Result<GasParams> {
        if !(a > 0.0 && rho0 > 0.0 && a.is_finite() && rho0.is_finite()) {
            return Err(Error::Data(format!("need a > 0 and ρ₀ > 0, got a = {a}, ρ₀ = {rho0}")));
        }
        Ok(GasParams { a, rho0 })
    }

    /// Parameters with unit density and the given coupling `g = 16πaρ₀`.
    pub fn from_coupling(g: f64) -> Result<GasParams> {
        GasParams::new(g / (16.0 * PI), 1.0)
    }

    /// `g = 16πaρ₀`.
    pub fn g(&self) -> f64 {
        16.0 * PI * self.a * self.rho0
    }

    /// `8πaρ₀ = g/2`.
    pub fn half_g(&self) -> f64 {
        0.5 * self.g()
    }

    /// Healing length `1/√g`.
    pub fn healing_length(&self) -> f64 {
        self.g().sqrt().recip()
    }
}

/// Scaled coordinates `r̃ = √g r`, `τ = g t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledPoint {
    pub r_tilde: f64,
    pub tau: f64,
}

impl ScaledPoint {
    pub fn new(r_tilde: f64, tau: f64) -> Result<ScaledPoint> {
        if !(r_tilde >= 0.0 && tau > 0.0 && r_tilde.is_finite() && tau.is_finite()) {
            return Err(Error::Data(format!("need r̃ ≥ 0 and τ > 0, got ({r_tilde}, {tau})")));
        }
        Ok(ScaledPoint { r_tilde, tau })
    }

    pub fn from_physical(r: f64, t: f64, gas: &GasParams) -> Result<ScaledPoint> {
        let g = gas.g();
        ScaledPoint::new(g.sqrt() * r, g * t)
    }
}

/// Initial pair-excitation data `f̂₀(k)`.
#[derive(Clone)]
pub enum InitialData {
    Zero,
    /// `f̂₀(k) = A (2πσ²)^{3/2} e^{−σ²k²/2}`, the transform of `A e^{−r²/(2σ²)}`.
    Gaussian {
        amplitude: f64,
        sigma: f64,
    },
    /// Linear interpolation in `k` (strictly increasing nodes); zero outside.
    Tabulated {
        k: Vec<f64>,
        values: Vec<Complex64>,
    },
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::Zero => write!(f, "Zero"),
            InitialData::Gaussian { amplitude, sigma } => {
                write!(f, "Gaussian {{ amplitude: {amplitude}, sigma: {sigma} }}")
            }
            InitialData::Tabulated { k, .. } => write!(f, "Tabulated({} nodes)", k.len()),
            InitialData::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialData::Gaussian { amplitude, sigma } if !(amplitude.is_finite() && *sigma > 0.0) => {
                Err(Error::Data(format!("Gaussian initial data needs σ > 0, got {sigma}")))
            }
            InitialData::Tabulated { k, values } => {
                if k.len() != values.len() || k.len() < 2 {
                    return Err(Error::Data("tabulated initial data needs ≥ 2 matching nodes".into()));
                }
                if k.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Data("tabulated k nodes must increase strictly".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn fhat(&self, k: f64) -> Complex64 {
        match self {
            InitialData::Zero => Complex64::new(0.0, 0.0),
            InitialData::Gaussian { amplitude, sigma } => {
                let s2 = sigma * sigma;
                Complex64::new(amplitude * (2.0 * PI * s2).powf(1.5) * (-0.5 * s2 * k * k).exp(), 0.0)
            }
            InitialData::Tabulated { k: nodes, values } => {
                if k < nodes[0] || k > nodes[nodes.len() - 1] {
                    return Complex64::new(0.0, 0.0);
                }
                let i = nodes.partition_point(|&x| x <= k).clamp(1, nodes.len() - 1);
                let (k0, k1) = (nodes[i - 1], nodes[i]);
                let w = (k - k0) / (k1 - k0);
                values[i - 1] * (1.0 - w) + values[i] * w
            }
            InitialData::Custom(f) => f(k),
        }
    }
}

/// Bogoliubov dispersion `ω(k) = k√(k² + g)`.
pub fn omega(k: f64, gas: &GasParams) -> f64 {
    k * (k * k + gas.g()).sqrt()
}

/// Steady kernel `ĝ₀(k) = −(k² + 8πaρ₀ − k√(k² + 16πaρ₀))/(8πaρ₀)`, in `[−1, 0)`.
///
/// Evaluated as `−(g/2)/(k² + g/2 + k√(k²+g))`, free of cancellation.
pub fn g0_hat(k: f64, gas: &GasParams) -> f64 {
    let h = gas.half_g();
    -h / (k * k + h + omega(k, gas))
}

/// `p̂₀ = (ĝ₀ − f̂₀)/(1 − ĝ₀ f̂₀)`.
pub fn p0_hat(k: f64, f0: Complex64, gas: &GasParams) -> Result<Complex64> {
    let g0 = g0_hat(k, gas);
    let den = 1.0 - f0 * g0;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("1 − ĝ₀f̂₀ vanishes at k = {k}")));
    }
    finite((g0 - f0) / den, "p̂₀")
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Data(format!("momentum must be finite and ≥ 0, got {k}")));
    }
    Ok(())
}

/// Exact solution
/// `K̂(k,t) = ĝ₀ − (1 − ĝ₀²) p̂₀ e^{−2iωt} / (1 − ĝ₀ p̂₀ e^{−2iωt})`.
pub fn khat_exact(k: f64, t: f64, f0: Complex64, gas: &GasParams) -> Result<Complex64> {
    check_k(k)?;
    let g0 = g0_hat(k, gas);
    let p = p0_hat(k, f0, gas)?;
    let e = Complex64::from_polar(1.0, -2.0 * omega(k, gas) * t);
    let den = 1.0 - g0 * p * e;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("denominator of K̂ vanishes at k = {k}, t = {t}")));
    }
    finite(g0 - (1.0 - g0 * g0) * p * e / den, "K̂")
}

/// The same solution written in the dimensionless variables `α² = k²/(8πaρ₀)`,
/// `s = 8πaρ₀ t`:
/// `z = q − 1 − α² + 2q C e^{−2iqs}/(1 − C e^{−2iqs})`, `q = α√(2+α²)`,
/// `C = (z₀ + 1 + α² − q)/(z₀ + 1 + α² + q)`.
pub fn khat_alpha_form(k: f64, t: f64, f0: Complex64, gas: &GasParams) -> Result<Complex64> {
    check_k(k)?;
    let h = gas.half_g();
    let alpha2 = k * k / h;
    let q = (alpha2 * (2.0 + alpha2)).sqrt();
    let s = h * t;
    let num = f0 + 1.0 + alpha2 - q;
    let den = f0 + 1.0 + alpha2 + q;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("integration constant undefined at k = {k}")));
    }
    let cexp = num / den * Complex64::from_polar(1.0, -2.0 * q * s);
    let d = 1.0 - cexp;
    if d.norm() < 1e-14 {
        return Err(Error::Singular(format!("denominator vanishes at k = {k}, t = {t}")));
    }
    // q − 1 − α² = ĝ₀, formed stably
    finite(g0_hat(k, gas) + 2.0 * q * cexp / d, "K̂ (α form)")
}

/// Integrates `i dK̂/dt = 8πaρ₀ K̂² + 2(k² + 8πaρ₀) K̂ + 8πaρ₀`, `K̂(0) = f̂₀`,
/// reporting `K̂` on `t_grid` (non-decreasing, starting at or after 0).
pub fn riccati_numeric(k: f64, t_grid: &[f64], f0: Complex64, gas: &GasParams, tol: f64) -> Result<Vec<Complex64>> {
    check_k(k)?;
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Data("time grid must be non-decreasing and non-negative".into()));
    }
    let h = gas.half_g();
    let b = 2.0 * (k * k + h);
    let mi = Complex64::new(0.0, -1.0);
    let opts = OdeOptions { rtol: tol, atol: tol * 1e-2, ..Default::default() };
    let sol = ode::integrate(
        |_, y, d| {
            let z = y[0];
            d[0] = mi * (h * z * z + b * z + h);
        },
        0.0,
        &[f0],
        t_grid,
        opts,
    )?;
    Ok(sol.into_iter().map(|v| v[0]).collect())
}

/// Steady kernel in position space,
/// `g₀(r) = π^{−2} (4πaρ₀)^{3/2} χ^{−1} Im[S_{0,0}(iχ) − S_{0,4}(iχ)]`, `χ = √g r`.
pub fn steady_g0_r(r: f64, gas: &GasParams) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("g₀(r) needs r > 0, got {r}")));
    }
    let chi = gas.g().sqrt() * r;
    let iz = Complex64::new(0.0, chi);
    let s0 = lommel_s(LommelOrder::ZERO_ZERO, iz, 0)?;
    let s4 = lommel_s(LommelOrder::ZERO_FOUR, iz, 0)?;
    let pref = (gas.g() / 4.0).powf(1.5) / (PI * PI * chi);
    Ok(pref * (s0 - s4).im)
}

/// Independent evaluation of `g₀(r) = (2π²r)^{−1} ∫ k sin(kr) ĝ₀(k) dk`.
///
/// The slowly decaying part `−(g/4)/(k² + g/2)` is transformed in closed form;
/// the remainder decays like `k^{−6}` and is integrated numerically.
pub fn steady_g0_r_quadrature(r: f64, gas: &GasParams, tol: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("g₀(r) needs r > 0, got {r}")));
    }
    let g = gas.g();
    let h = 0.5 * g;
    let m = h.sqrt();
    let closed = -g * (-m * r).exp() / (16.0 * PI * r);
    let rest = |k: f64| {
        let apb = k * k + h + omega(k, gas);
        let d = -(g * g * g / 16.0) / ((k * k + h) * apb * apb);
        Complex64::new(k * (k * r).sin() * d, 0.0)
    };
    // tail beyond K is below g³/(256 K⁴)
    let k_max = (g * g * g / (256.0 * tol * 1e-3)).powf(0.25).max(20.0 * g.sqrt());
    let period = PI / r;
    let n = ((k_max / period).ceil() as usize).clamp(1, 200_000);
    let breaks: Vec<f64> = (0..=n).map(|i| k_max * i as f64 / n as f64).collect();
    let v = quad::integrate_pieces(rest, &breaks, tol * 1e-3 * g, tol, 200)?;
    Ok(closed + v.value.re / (2.0 * PI * PI * r))
}

/// Options for the contour-quadrature evaluation of Λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    /// Relative tolerance of the quadrature.
    pub tol: f64,
    /// Clockwise rotation angle θ of the integration ray `η = s e^{−iθ}`.
    pub contour_angle: f64,
    pub max_panels: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { tol: 1e-10, contour_angle: 0.1, max_panels: 20_000 }
    }
}

fn expm1(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * c - 2.0 * half * half, w.re.exp() * s)
}

/// `Λ(r̃, τ) = (2π² r̃)^{−1} ∫₀^∞ sinh²2η sin(r̃ sinh η) e^{w}/(1 − e^{w}) dη`,
/// `w = −4η − iτ sinh 2η`, evaluated along the ray `η = s e^{−iθ}` where the
/// integrand decays doubly exponentially.
pub fn lambda_oracle(pt: ScaledPoint, opts: OracleOptions) -> Result<Complex64> {
    let ScaledPoint { r_tilde: rt, tau } = pt;
    let theta = opts.contour_angle;
    if !(theta > 0.0 && theta < PI / 4.0) {
        return Err(Error::Contour(format!("contour angle must lie in (0, π/4), got {theta}")));
    }
    let dir = Complex64::from_polar(1.0, -theta);
    let small_r = rt < 1e-8;
    let integrand = |s: f64| -> Complex64 {
        let eta = dir * s;
        let sh2 = (eta * 2.0).sinh();
        let w = -4.0 * eta - Complex64::new(0.0, tau) * sh2;
        let den = -expm1(w);
        let sin_part = if small_r {
            // sin(r̃ sinh η)/r̃ → sinh η
            let sh = eta.sinh();
            w.exp() * sh * (1.0 - (sh * rt).powi(2) / 6.0)
        } else {
            let a = eta.sinh() * rt;
            if a.im.abs() < 30.0 {
                w.exp() * a.sin() / rt
            } else {
                // keep e^{w} and e^{±ia} together to avoid overflow
                let ia = Complex64::new(-a.im, a.re);
                ((w + ia).exp() - (w - ia).exp()) / Complex64::new(0.0, 2.0 * rt)
            }
        };
        sh2 * sh2 * sin_part / den
    };
    // log-magnitude bound of the integrand
    let log_bound = |s: f64| -> f64 {
        let eta = dir * s;
        let sh2 = (eta * 2.0).sinh();
        let w = -4.0 * eta - Complex64::new(0.0, tau) * sh2;
        let ia = (eta.sinh() * rt).im.abs();
        2.0 * sh2.norm().max(1e-300).ln() + w.re + ia
    };
    // e^{−iτ sinh 2η} decays on the ray only while 2s sin θ < π; past that the
    // integrand grows doubly exponentially
    let s_limit = 0.95 * PI / (2.0 * theta.sin());
    let mut peak = f64::NEG_INFINITY;
    let ds = 0.01;
    let mut s = ds;
    let s_max = loop {
        let l = log_bound(s);
        peak = peak.max(l);
        if l < peak - 80.0 {
            break s;
        }
        if s > s_limit {
            return Err(Error::Contour(format!(
                "integrand has not decayed by s = {s_limit:.2} on the ray at angle {theta}; τ = {tau} is too small"
            )));
        }
        s += ds;
    };
    if !peak.is_finite() {
        return Err(Error::Contour("integrand bound is not finite".into()));
    }
    // panels of a few oscillation periods
    let freq = 2.0 * tau + rt + 4.0;
    let width = (8.0 * PI / freq).min(0.25);
    let n = ((s_max / width).ceil() as usize).clamp(1, 100_000);
    let breaks: Vec<f64> = (0..=n).map(|i| s_max * i as f64 / n as f64).collect();
    let mut largest: f64 = 0.0;
    let tracked = |s: f64| {
        let v = integrand(s);
        largest = largest.max(v.norm());
        v
    };
    let r = quad::integrate_pieces(tracked, &breaks, 0.0, opts.tol, opts.max_panels)?;
    // rounding in the sum is ~ε·max|f|·length; refuse results it swamps
    let rounding = f64::EPSILON * largest * s_max;
    if rounding > opts.tol.max(1e-8) * r.value.norm() {
        return Err(Error::Contour(format!(
            "cancellation: integrand reaches {largest:.3e} but the integral is {:.3e}; τ = {tau} is too small",
            r.value.norm()
        )));
    }
    let v = r.value * dir / (2.0 * PI * PI);
    finite(v, "Λ oracle")
}

/// Full kernel `K(r,t) = g₀(r) + g^{3/2} Λ(√g r, g t)` for `f̂₀ = 0`.
pub fn kernel_r(r: f64, t: f64, gas: &GasParams, opts: OracleOptions) -> Result<Complex64> {
    let pt = ScaledPoint::from_physical(r, t, gas)?;
    let lam = lambda_oracle(pt, opts)?;
    Ok(steady_g0_r(r, gas)? + gas.g().powf(1.5) * lam)
}
