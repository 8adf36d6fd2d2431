//! Slowly varying trap: Thomas–Fermi condensate profile, local rescaling of
//! the homogeneous pair dynamics inside the condensate region ℛ, and free
//! diffusion of the initial data outside it.
//!
//! The profile solves `[V(x) + (g/2)φ₀² − μ]φ₀ = 0` with the threshold
//! `μ = (g/4)ζ + E`, closed by the normalization `Ω⁻¹∫φ₀² = 1`.

use crate::asymptotics::{lambda_asymptotic, DEFAULT_REGION_THRESHOLD};
use crate::error::{Error, Result};
use crate::homogeneous::{self, lambda_oracle, GasParams, InitialData, OracleOptions, ScaledPoint};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type Position = [f64; 3];

/// Default lower bound on `φ₀²/max φ₀²` for interior evaluations.
pub const DEFAULT_MARGIN: f64 = 0.05;

fn norm3(x: &Position) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// External potential `V(x)` (energy, ħ = 2m = 1).
#[derive(Clone)]
pub enum Potential {
    /// `V ≡ c`: the homogeneous gas.
    Constant(f64),
    /// `V = ε²|x|²` with the model's slowness parameter ε.
    Quadratic,
    /// Isotropic `V = v(|x|)`.
    Radial(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Anything else; integrated on a tensor grid.
    General(Arc<dyn Fn(&Position) -> f64 + Send + Sync>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Constant(c) => write!(f, "Constant({c})"),
            Potential::Quadratic => write!(f, "Quadratic"),
            Potential::Radial(_) => write!(f, "Radial"),
            Potential::General(_) => write!(f, "General"),
        }
    }
}

/// System volume Ω, centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Ball { radius: f64 },
    Cube { half_width: f64 },
}

impl Domain {
    pub fn volume(&self) -> f64 {
        match *self {
            Domain::Ball { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            Domain::Cube { half_width } => (2.0 * half_width).powi(3),
        }
    }

    pub fn contains(&self, x: &Position) -> bool {
        match *self {
            Domain::Ball { radius } => norm3(x) <= radius,
            Domain::Cube { half_width } => x.iter().all(|c| c.abs() <= half_width),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrapModel {
    pub potential: Potential,
    /// Slowness parameter; recorded for validity reporting (and used by
    /// [`Potential::Quadratic`]).
    pub epsilon: f64,
    pub domain: Domain,
    pub gas: GasParams,
    /// Points per axis for tensor-grid quadrature.
    pub grid_points: usize,
}

impl TrapModel {
    pub fn new(potential: Potential, epsilon: f64, domain: Domain, gas: GasParams) -> Result<TrapModel> {
        let size = match domain {
            Domain::Ball { radius } => radius,
            Domain::Cube { half_width } => half_width,
        };
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::Data(format!("domain size must be positive, got {size}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Data(format!("slowness parameter must be positive, got {epsilon}")));
        }
        Ok(TrapModel { potential, epsilon, domain, gas, grid_points: 128 })
    }

    /// Ω.
    pub fn omega(&self) -> f64 {
        self.domain.volume()
    }

    pub fn potential_at(&self, x: &Position) -> f64 {
        match &self.potential {
            Potential::Constant(c) => *c,
            Potential::Quadratic => self.epsilon * self.epsilon * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]),
            Potential::Radial(v) => v(norm3(x)),
            Potential::General(v) => v(x),
        }
    }

    fn radial_potential(&self) -> Option<Box<dyn Fn(f64) -> f64 + '_>> {
        match (&self.potential, self.domain) {
            (Potential::Quadratic, Domain::Ball { .. }) => {
                let e2 = self.epsilon * self.epsilon;
                Some(Box::new(move |r| e2 * r * r))
            }
            (Potential::Radial(v), Domain::Ball { .. }) => Some(Box::new(move |r| v(r))),
            _ => None,
        }
    }
}

/// `ℛ = {x : V(x) < μ}` with `μ = (g/4)ζ + E`.
#[derive(Clone, Debug)]
pub struct RegionR {
    pub threshold: f64,
    model: TrapModel,
}

impl RegionR {
    pub fn contains(&self, x: &Position) -> bool {
        self.model.domain.contains(x) && self.model.potential_at(x) < self.threshold
    }
}

/// Self-consistent Thomas–Fermi state.
#[derive(Clone, Debug)]
pub struct TfSolution {
    /// Energy per particle E.
    pub energy: f64,
    /// `ζ = Ω⁻¹∫φ₀⁴`.
    pub zeta: f64,
    /// `ζ_e = Ω⁻¹∫Vφ₀²`.
    pub zeta_e: f64,
    /// `μ = (g/4)ζ + E`.
    pub threshold: f64,
    /// `max φ₀²` over the domain.
    pub max_phi0_sq: f64,
    /// Quadrature estimate of `|Ω⁻¹∫φ₀² − 1|`.
    pub norm_error: f64,
    /// ℛ reaches the wall of Ω, so φ₀ does not vanish on ∂ℛ there.
    pub fills_domain: bool,
    model: TrapModel,
}

impl TfSolution {
    pub fn model(&self) -> &TrapModel {
        &self.model
    }

    pub fn gas(&self) -> GasParams {
        self.model.gas
    }

    pub fn region(&self) -> RegionR {
        RegionR { threshold: self.threshold, model: self.model.clone() }
    }

    /// `φ₀(x)²`; zero outside ℛ.
    pub fn phi0_sq(&self, x: &Position) -> f64 {
        if !self.model.domain.contains(x) {
            return 0.0;
        }
        if let Potential::Constant(_) = self.model.potential {
            return 1.0;
        }
        (self.threshold - self.model.potential_at(x)).max(0.0) / self.model.gas.half_g()
    }

    pub fn phi0(&self, x: &Position) -> f64 {
        self.phi0_sq(x).sqrt()
    }

    /// Residual of the algebraic profile equation at `x`.
    pub fn residual(&self, x: &Position) -> f64 {
        let p2 = self.phi0_sq(x);
        (self.model.potential_at(x) + self.model.gas.half_g() * p2 - self.threshold) * p2.sqrt()
    }

    /// Thomas–Fermi radius for isotropic increasing potentials on a ball.
    pub fn tf_radius(&self) -> Option<f64> {
        let v = self.model.radial_potential()?;
        let Domain::Ball { radius } = self.model.domain else { return None };
        if v(radius) <= self.threshold {
            return Some(radius);
        }
        let (mut a, mut b) = (0.0, radius);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if v(m) < self.threshold {
                a = m
            } else {
                b = m
            }
        }
        Some(0.5 * (a + b))
    }
}

/// Moments `Ω⁻¹∫(φ₀², φ₀⁴, Vφ₀²)` at threshold μ.
struct Moments {
    norm: f64,
    quartic: f64,
    potential: f64,
    error: f64,
    fills: bool,
}

fn radial_moments(model: &TrapModel, v: &dyn Fn(f64) -> f64, mu: f64, tol: f64) -> Result<Moments> {
    let Domain::Ball { radius } = model.domain else { unreachable!() };
    let hg = model.gas.half_g();
    // locate sign changes of μ − v so the kinks become panel ends
    let n = 512;
    let mut breaks = vec![0.0];
    let mut prev = mu - v(0.0);
    for i in 1..=n {
        let r = radius * i as f64 / n as f64;
        let cur = mu - v(r);
        if (cur > 0.0) != (prev > 0.0) {
            let (mut a, mut b) = (radius * (i - 1) as f64 / n as f64, r);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if ((mu - v(m)) > 0.0) == (prev > 0.0) {
                    a = m
                } else {
                    b = m
                }
            }
            breaks.push(0.5 * (a + b));
        }
        prev = cur;
    }
    breaks.push(radius);
    let fills = mu - v(radius) > 0.0;
    let w = 4.0 * PI / model.omega();
    let mut out = [0.0; 3];
    let mut error = 0.0;
    for (j, slot) in out.iter_mut().enumerate() {
        let f = |r: f64| {
            let vr = v(r);
            let p2 = (mu - vr).max(0.0) / hg;
            let val = match j {
                0 => p2,
                1 => p2 * p2,
                _ => vr * p2,
            };
            Complex64::new(w * r * r * val, 0.0)
        };
        let q = quad::integrate_pieces(f, &breaks, 0.0, tol, 2000).map_err(|e| Error::Solver(format!("{e}")))?;
        *slot = q.value.re;
        if j == 0 {
            error = q.error;
        }
    }
    Ok(Moments { norm: out[0], quartic: out[1], potential: out[2], error, fills })
}

/// Tensor-grid data: cell-centred potential values and the cell weight.
struct Grid {
    values: Vec<f64>,
    /// Fine cells touching the wall of Ω.
    edge: Vec<bool>,
    coarse: Vec<f64>,
    weight: f64,
    coarse_weight: f64,
    outside: f64,
}

fn build_grid(model: &TrapModel) -> Grid {
    let (half, n) = match model.domain {
        Domain::Ball { radius } => (radius, model.grid_points),
        Domain::Cube { half_width } => (half_width, model.grid_points),
    };
    let n = n.max(8) & !1;
    let sample = |n: usize| -> (Vec<f64>, Vec<bool>, f64) {
        let h = 2.0 * half / n as f64;
        let mut vals = Vec::with_capacity(n * n * n);
        let mut edge = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = [-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h, -half + (k as f64 + 0.5) * h];
                    let inside = model.domain.contains(&x);
                    vals.push(if inside { model.potential_at(&x) } else { f64::INFINITY });
                    let near_wall = match model.domain {
                        Domain::Ball { radius } => norm3(&x) > radius - 1.8 * h,
                        Domain::Cube { .. } => [i, j, k].iter().any(|&c| c == 0 || c == n - 1),
                    };
                    edge.push(inside && near_wall);
                }
            }
        }
        (vals, edge, h * h * h / model.omega())
    };
    let (values, edge, weight) = sample(n);
    let (coarse, _, coarse_weight) = sample(n / 2);
    Grid { values, edge, coarse, weight, coarse_weight, outside: f64::INFINITY }
}

fn grid_moments(grid: &Grid, hg: f64, mu: f64) -> Moments {
    let sum = |vals: &[f64], w: f64| {
        let mut m = [0.0; 3];
        for &v in vals {
            if v == grid.outside || v >= mu {
                continue;
            }
            let p2 = (mu - v) / hg;
            m[0] += p2;
            m[1] += p2 * p2;
            m[2] += v * p2;
        }
        [m[0] * w, m[1] * w, m[2] * w]
    };
    let fine = sum(&grid.values, grid.weight);
    let coarse = sum(&grid.coarse, grid.coarse_weight);
    let fills = grid.values.iter().zip(&grid.edge).any(|(&v, &e)| e && v < mu);
    Moments { norm: fine[0], quartic: fine[1], potential: fine[2], error: (fine[0] - coarse[0]).abs(), fills }
}

/// Solves for the Thomas–Fermi profile: a bracketed 1D root in the threshold
/// μ for the normalization, then ζ, ζ_e and `E = (g/4)ζ + ζ_e`.
pub fn solve_tf(model: &TrapModel, tol: f64) -> Result<TfSolution> {
    if !(tol > 0.0) {
        return Err(Error::Data(format!("tolerance must be positive, got {tol}")));
    }
    let hg = model.gas.half_g();
    let quarter_g = 0.5 * hg;
    if let Potential::Constant(c) = model.potential {
        if !c.is_finite() {
            return Err(Error::Infeasible("constant potential is not finite".into()));
        }
        return Ok(TfSolution {
            energy: quarter_g + c,
            zeta: 1.0,
            zeta_e: c,
            threshold: c + hg,
            max_phi0_sq: 1.0,
            norm_error: 0.0,
            fills_domain: true,
            model: model.clone(),
        });
    }

    let radial = model.radial_potential();
    let grid = if radial.is_none() { Some(build_grid(model)) } else { None };
    let qtol = (tol * 1e-3).max(1e-14);
    let moments = |mu: f64| -> Result<Moments> {
        match (&radial, &grid) {
            (Some(v), _) => radial_moments(model, v.as_ref(), mu, qtol),
            (None, Some(g)) => Ok(grid_moments(g, hg, mu)),
            _ => unreachable!(),
        }
    };

    // lower bracket: the minimum of V (nothing occupied)
    let v_min = match (&radial, &grid) {
        (Some(v), _) => {
            let Domain::Ball { radius } = model.domain else { unreachable!() };
            (0..=4096).map(|i| v(radius * i as f64 / 4096.0)).fold(f64::INFINITY, f64::min)
        }
        (None, Some(g)) => g.values.iter().copied().fold(f64::INFINITY, f64::min),
        _ => unreachable!(),
    };
    if !v_min.is_finite() {
        return Err(Error::Infeasible("potential has no finite value inside Ω".into()));
    }
    let mut lo = v_min;
    let mut hi = v_min + hg;
    let mut tries = 0;
    while moments(hi)?.norm < 1.0 {
        lo = hi;
        hi = v_min + 2.0 * (hi - v_min);
        tries += 1;
        if tries > 200 || !hi.is_finite() {
            return Err(Error::Infeasible("no threshold gives a normalized condensate".into()));
        }
    }
    // the normalization is continuous and increasing in μ: bisect, then polish
    let mut iters = 0;
    while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(hg) {
        let mid = 0.5 * (lo + hi);
        if moments(mid)?.norm < 1.0 {
            lo = mid
        } else {
            hi = mid
        }
        iters += 1;
        if iters > 400 {
            return Err(Error::Solver("threshold bisection did not converge".into()));
        }
    }
    let mu = 0.5 * (lo + hi);
    let m = moments(mu)?;
    if m.norm == 0.0 {
        return Err(Error::Infeasible("condensate region is empty".into()));
    }
    let norm_error = (m.norm - 1.0).abs().max(m.error);
    if norm_error > tol {
        return Err(Error::Solver(format!("normalization only reached to {norm_error:.3e} (tolerance {tol:.1e})")));
    }
    let max_phi0_sq = (mu - v_min) / hg;
    Ok(TfSolution {
        energy: quarter_g * m.quartic + m.potential,
        zeta: m.quartic,
        zeta_e: m.potential,
        threshold: mu,
        max_phi0_sq,
        norm_error,
        fills_domain: m.fills,
        model: model.clone(),
    })
}

/// Local gas `ρ₀ → ρ₀φ₀(R)²`, refusing points too close to ∂ℛ.
pub fn local_gas(r_cm: &Position, tf: &TfSolution, margin: f64) -> Result<GasParams> {
    let p2 = tf.phi0_sq(r_cm);
    if !(p2 > 0.0) || p2 < margin * tf.max_phi0_sq {
        return Err(Error::Region(format!(
            "φ₀² = {p2:.3e} at R = {r_cm:?} is below {margin} × max φ₀² = {:.3e}",
            margin * tf.max_phi0_sq
        )));
    }
    GasParams::new(tf.model.gas.a, tf.model.gas.rho0 * p2)
}

/// `r̃(R) = [gφ₀(R)²]^{1/2} r`, `τ(R) = gφ₀(R)² t`.
pub fn local_scaling(r_cm: &Position, r: f64, t: f64, tf: &TfSolution, margin: f64) -> Result<ScaledPoint> {
    let gas = local_gas(r_cm, tf, margin)?;
    ScaledPoint::from_physical(r, t, &gas)
}

/// Exact momentum-space kernel at centre of mass `R` inside ℛ.
pub fn khat_slow(r_cm: &Position, k: f64, t: f64, init: &InitialData, tf: &TfSolution) -> Result<Complex64> {
    init.validate()?;
    let gas = local_gas(r_cm, tf, 0.0)?;
    homogeneous::khat_exact(k, t, init.fhat(k), &gas)
}

/// Free diffusion `K₀(r, t) = ∫ f(r′) e^{−|r−r′|²/(8t)} (8πt)^{−3/2} dr′` of
/// radial data, evaluated as `(2π²r)⁻¹∫ k sin(kr) f̂(k) e^{−2k²t} dk`.
pub fn exterior_kernel(r_cm: &Position, r: f64, t: f64, init: &InitialData, tf: &TfSolution) -> Result<f64> {
    if tf.region().contains(r_cm) {
        return Err(Error::Region(format!("R = {r_cm:?} lies inside the condensate region")));
    }
    diffuse(r, t, init)
}

/// The region-independent diffusion integral behind [`exterior_kernel`].
pub fn diffuse(r: f64, t: f64, init: &InitialData) -> Result<f64> {
    if !(t > 0.0 && r >= 0.0 && r.is_finite()) {
        return Err(Error::Data(format!("need t > 0 and r ≥ 0, got t = {t}, r = {r}")));
    }
    init.validate()?;
    if let InitialData::Zero = init {
        return Ok(0.0);
    }
    // e^{−2k²t} < 1e−19 beyond k_max
    let mut k_max = (44.0 / (2.0 * t)).sqrt();
    if let InitialData::Tabulated { k, .. } = init {
        k_max = k_max.min(k[k.len() - 1]);
    }
    let f = |k: f64| {
        let w = if r > 0.0 { k * (k * r).sin() / r } else { k * k };
        init.fhat(k) * (w * (-2.0 * k * k * t).exp())
    };
    let n = (k_max * r / PI).ceil().clamp(1.0, 4096.0) as usize;
    let breaks: Vec<f64> = (0..=n).map(|i| k_max * i as f64 / n as f64).collect();
    let q = quad::integrate_pieces(f, &breaks, 1e-300, 1e-13, 4000).map_err(|e| match e {
        Error::Contour(m) => Error::Data(format!("initial data not integrable: {m}")),
        e => e,
    })?;
    let v = q.value / (2.0 * PI * PI);
    if v.im.abs() > 1e-10 * v.re.abs().max(1e-300) {
        return Err(Error::Data("initial data is not real and even".into()));
    }
    Ok(v.re)
}

/// Similarity form `(8πt)^{−3/2} e^{−r²/(8t)} ∫f`, valid for `t ≫ L²`.
pub fn similarity_kernel(r: f64, t: f64, init: &InitialData) -> Result<f64> {
    init.validate()?;
    let mass = init.fhat(0.0).re;
    Ok(mass * (8.0 * PI * t).powf(-1.5) * (-r * r / (8.0 * t)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMethod {
    Asymptotic,
    Oracle,
}

/// `Λ(R, r, t) = [gφ₀(R)²]^{−3/2}[K₀(R, r, t) − g₀(R, r)]` for zero initial
/// data, evaluated at the locally rescaled point.
pub fn lambda_slow(
    r_cm: &Position,
    r: f64,
    t: f64,
    tf: &TfSolution,
    margin: f64,
    method: LambdaMethod,
) -> Result<Complex64> {
    let pt = local_scaling(r_cm, r, t, tf, margin)?;
    match method {
        LambdaMethod::Asymptotic => lambda_asymptotic(pt, DEFAULT_REGION_THRESHOLD),
        LambdaMethod::Oracle => lambda_oracle(pt, OracleOptions::default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::lambda_asymptotic;

    fn unit() -> GasParams {
        GasParams::from_coupling(1.0).unwrap()
    }

    fn quadratic(eps: f64, radius: f64) -> TrapModel {
        TrapModel::new(Potential::Quadratic, eps, Domain::Ball { radius }, unit()).unwrap()
    }

    /// Hand-integrated TF quantities for V = ε²r² with ℛ inside the ball:
    /// the region is the ball r < √μ/ε inside Ω.
    fn quadratic_oracle(eps: f64, omega: f64, g: f64) -> (f64, f64, f64, f64) {
        let hg = g / 2.0;
        // ∫4πr²(μ−ε²r²)dr over r < √μ/ε = (8π/15)μ^{5/2}/ε³
        let mu = (omega * hg * 15.0 * eps.powi(3) / (8.0 * PI)).powf(0.4);
        // ∫4πr²(μ−ε²r²)²dr = (32π/105)μ^{7/2}/ε³
        let zeta = 32.0 * PI / 105.0 * mu.powf(3.5) / eps.powi(3) / (hg * hg * omega);
        // ∫4πr² ε²r²(μ−ε²r²)dr = (8π/35)μ^{7/2}/ε³
        let zeta_e = 8.0 * PI / 35.0 * mu.powf(3.5) / eps.powi(3) / (hg * omega);
        (mu, zeta, zeta_e, g / 4.0 * zeta + zeta_e)
    }

    #[test]
    fn constant_potential_is_homogeneous() {
        let model = TrapModel::new(Potential::Constant(0.3), 0.01, Domain::Cube { half_width: 10.0 }, unit()).unwrap();
        let tf = solve_tf(&model, 1e-10).unwrap();
        assert_eq!(tf.zeta, 1.0);
        assert_eq!(tf.zeta_e, 0.3);
        assert_eq!(tf.energy, 0.25 + 0.3);
        for x in [[0.0, 0.0, 0.0], [3.0, -2.0, 9.0]] {
            assert_eq!(tf.phi0(&x), 1.0);
        }
        let pt = local_scaling(&[1.0, 0.0, 0.0], 2.0, 8.0, &tf, DEFAULT_MARGIN).unwrap();
        assert_eq!(pt, ScaledPoint::from_physical(2.0, 8.0, &unit()).unwrap());
        let a = lambda_slow(&[0.0; 3], 50.0, 100.0, &tf, DEFAULT_MARGIN, LambdaMethod::Asymptotic).unwrap();
        assert_eq!(a, lambda_asymptotic(ScaledPoint::new(50.0, 100.0).unwrap(), 5.0).unwrap());
        let k = khat_slow(&[0.0; 3], 0.7, 3.0, &InitialData::Zero, &tf).unwrap();
        assert_eq!(k, homogeneous::khat_exact(0.7, 3.0, Complex64::new(0.0, 0.0), &unit()).unwrap());
    }

    #[test]
    fn quadratic_trap_matches_closed_form() {
        let (eps, radius) = (0.02, 400.0);
        let model = quadratic(eps, radius);
        let tf = solve_tf(&model, 1e-10).unwrap();
        let (mu, zeta, zeta_e, e) = quadratic_oracle(eps, model.omega(), 1.0);
        assert!((tf.threshold / mu - 1.0).abs() < 1e-10, "{} vs {mu}", tf.threshold);
        assert!((tf.zeta / zeta - 1.0).abs() < 1e-9);
        assert!((tf.zeta_e / zeta_e - 1.0).abs() < 1e-9);
        assert!((tf.energy / e - 1.0).abs() < 1e-9);
        assert!((tf.tf_radius().unwrap() - mu.sqrt() / eps).abs() < 1e-9 * radius);
        assert!(!tf.fills_domain);
        // invariants
        assert!(tf.norm_error < 1e-8);
        assert!((tf.energy - (0.25 * tf.zeta + tf.zeta_e)).abs() < 1e-12 * tf.energy.abs());
        let rb = tf.tf_radius().unwrap();
        assert!(tf.phi0(&[rb * (1.0 - 1e-9), 0.0, 0.0]) < 1e-3);
        assert_eq!(tf.phi0(&[rb * 1.001, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn profile_equation_residual() {
        let tf = solve_tf(&quadratic(0.05, 200.0), 1e-10).unwrap();
        let rb = tf.tf_radius().unwrap();
        let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let x =
                [rb * (2.0 * next() - 1.0) * 0.57, rb * (2.0 * next() - 1.0) * 0.57, rb * (2.0 * next() - 1.0) * 0.57];
            assert!(tf.region().contains(&x));
            assert!(tf.residual(&x).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_quadrature_agrees_with_radial() {
        let (eps, half) = (0.05, 60.0);
        let v = Potential::General(Arc::new(move |x: &Position| eps * eps * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
        let mut model = TrapModel::new(v, eps, Domain::Cube { half_width: half }, unit()).unwrap();
        model.grid_points = 96;
        let tf = solve_tf(&model, 1e-2).unwrap();
        let (mu, zeta, _, _) = quadratic_oracle(eps, model.omega(), 1.0);
        assert!(mu.sqrt() / eps < half);
        assert!((tf.threshold / mu - 1.0).abs() < 2e-3, "{} vs {mu}", tf.threshold);
        assert!((tf.zeta / zeta - 1.0).abs() < 5e-3, "{} vs {zeta}", tf.zeta);
        assert!(!tf.fills_domain);
        // a box smaller than the cloud: ℛ is cut off by the walls
        let v = Potential::General(Arc::new(move |x: &Position| eps * eps * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
        let mut model = TrapModel::new(v, eps, Domain::Cube { half_width: 5.0 }, unit()).unwrap();
        model.grid_points = 32;
        assert!(solve_tf(&model, 1e-2).unwrap().fills_domain);
    }

    #[test]
    fn radial_potential_matches_quadratic() {
        let eps = 0.02;
        let v = Potential::Radial(Arc::new(move |r: f64| eps * eps * r * r));
        let a = solve_tf(&TrapModel::new(v, eps, Domain::Ball { radius: 400.0 }, unit()).unwrap(), 1e-10).unwrap();
        let b = solve_tf(&quadratic(eps, 400.0), 1e-10).unwrap();
        assert!((a.threshold - b.threshold).abs() < 1e-13 * b.threshold);
    }

    #[test]
    fn infeasible_and_region_errors() {
        let v = Potential::Radial(Arc::new(|_| f64::INFINITY));
        let model = TrapModel::new(v, 0.1, Domain::Ball { radius: 10.0 }, unit()).unwrap();
        assert!(matches!(solve_tf(&model, 1e-8), Err(Error::Infeasible(_))));
        let tf = solve_tf(&quadratic(0.02, 400.0), 1e-10).unwrap();
        let rb = tf.tf_radius().unwrap();
        assert!(matches!(local_scaling(&[0.99 * rb, 0.0, 0.0], 1.0, 1.0, &tf, DEFAULT_MARGIN), Err(Error::Region(_))));
        assert!(local_scaling(&[0.5 * rb, 0.0, 0.0], 1.0, 1.0, &tf, DEFAULT_MARGIN).is_ok());
        assert!(matches!(exterior_kernel(&[0.0; 3], 1.0, 1.0, &InitialData::Zero, &tf), Err(Error::Region(_))));
    }

    #[test]
    fn local_scaling_arithmetic() {
        // φ₀(R) = 1/2 with g = 1: r = 2, t = 8 → r̃ = 1, τ = 2
        let quarter = GasParams::new(unit().a, 0.25).unwrap();
        let pt = ScaledPoint::from_physical(2.0, 8.0, &quarter).unwrap();
        assert!((pt.r_tilde - 1.0).abs() < 1e-15 && (pt.tau - 2.0).abs() < 1e-15);
        let tf = solve_tf(&quadratic(0.02, 400.0), 1e-10).unwrap();
        let x = [0.5 * tf.tf_radius().unwrap(), 0.0, 0.0];
        let p2 = tf.phi0_sq(&x);
        let pt = local_scaling(&x, 2.0, 8.0, &tf, DEFAULT_MARGIN).unwrap();
        assert!((pt.r_tilde - 2.0 * p2.sqrt()).abs() < 1e-14);
        assert!((pt.tau - 8.0 * p2).abs() < 1e-14);
        let p1 = local_scaling(&x, 1.0, 3.0, &tf, DEFAULT_MARGIN).unwrap();
        let p2 = local_scaling(&x, 1.0, 6.0, &tf, DEFAULT_MARGIN).unwrap();
        assert!((p2.tau - 2.0 * p1.tau).abs() < 1e-14 * p2.tau);
    }

    #[test]
    fn interior_depends_on_r_only_through_profile() {
        let tf = solve_tf(&quadratic(0.02, 400.0), 1e-10).unwrap();
        let rb = tf.tf_radius().unwrap();
        let a = lambda_slow(&[0.3 * rb, 0.0, 0.0], 5.0, 60.0, &tf, DEFAULT_MARGIN, LambdaMethod::Asymptotic).unwrap();
        let b = lambda_slow(&[0.0, 0.0, -0.3 * rb], 5.0, 60.0, &tf, DEFAULT_MARGIN, LambdaMethod::Asymptotic).unwrap();
        assert_eq!(a, b);
        // τ = 100, r̃ = 1 transported to an off-centre point
        let x = [0.4 * rb, 0.0, 0.0];
        let g_loc = tf.phi0_sq(&x);
        let v =
            lambda_slow(&x, 1.0 / g_loc.sqrt(), 100.0 / g_loc, &tf, DEFAULT_MARGIN, LambdaMethod::Asymptotic).unwrap();
        let lead = PI * PI / 120.0 * 1e-8;
        assert!((v.re / lead - 1.0).abs() < 0.02);
    }

    #[test]
    fn khat_slow_limits() {
        let tf = solve_tf(&quadratic(0.02, 400.0), 1e-10).unwrap();
        let x = [50.0, 0.0, 0.0];
        let init = InitialData::Gaussian { amplitude: 0.1, sigma: 1.0 };
        let k0 = khat_slow(&x, 0.8, 0.0, &init, &tf).unwrap();
        assert!((k0 - init.fhat(0.8)).norm() < 1e-14);
        let gas = local_gas(&x, &tf, 0.0).unwrap();
        let g0 = homogeneous::g0_hat(0.8, &gas);
        // the transient is analytic in e^{−2iωt} and vanishes at 0, so its
        // average over one period leaves the steady value
        let period = PI / homogeneous::omega(0.8, &gas);
        let f = |t: f64| khat_slow(&x, 0.8, t, &init, &tf).unwrap();
        let avg = quad::integrate(f, 7.0, 7.0 + period, 0.0, 1e-13, 200).unwrap().value / period;
        assert!((avg - g0).norm() < 1e-11, "{avg} vs {g0}");
    }

    fn gaussian_oracle(r: f64, t: f64, amp: f64, sigma: f64) -> f64 {
        let s2 = sigma * sigma;
        amp * (s2 / (s2 + 4.0 * t)).powf(1.5) * (-r * r / (2.0 * (s2 + 4.0 * t))).exp()
    }

    #[test]
    fn exterior_gaussian_convolution() {
        let (amp, sigma) = (0.7, 1.3);
        let init = InitialData::Gaussian { amplitude: amp, sigma };
        for t in [0.01, 0.3, 5.0, 169.0] {
            let w = (sigma * sigma + 4.0 * t).sqrt();
            for r in [0.0, 1e-3, 0.5 * w, w, 3.0 * w] {
                let v = diffuse(r, t, &init).unwrap();
                let o = gaussian_oracle(r, t, amp, sigma);
                assert!((v - o).abs() < 1e-8 * o, "t={t} r={r}: {v} vs {o}");
            }
        }
        assert_eq!(diffuse(2.0, 1.0, &InitialData::Zero).unwrap(), 0.0);
    }

    #[test]
    fn exterior_similarity_and_decay() {
        let sigma: f64 = 0.8;
        let init = InitialData::Gaussian { amplitude: 1.0, sigma };
        let t = 100.0 * sigma * sigma;
        for r in [t.sqrt(), 2.0 * t.sqrt(), 4.0 * t.sqrt()] {
            let v = diffuse(r, t, &init).unwrap();
            let s = similarity_kernel(r, t, &init).unwrap();
            assert!((v / s - 1.0).abs() < 0.02);
        }
        let mut prev = f64::INFINITY;
        let mut t = 1.0;
        for _ in 0..6 {
            let sup = diffuse(0.0, t, &init).unwrap();
            assert!(sup < prev);
            prev = sup;
            t *= 2.0;
        }
    }

    #[test]
    fn exterior_mass_conservation() {
        let init = InitialData::Gaussian { amplitude: 1.0, sigma: 1.0 };
        let mass = init.fhat(0.0).re;
        for t in [0.1_f64, 2.0, 30.0] {
            let w = (1.0 + 4.0 * t).sqrt();
            let f = |r: f64| Complex64::new(4.0 * PI * r * r * diffuse(r, t, &init).unwrap(), 0.0);
            let q = quad::integrate(f, 0.0, 14.0 * w, 0.0, 1e-10, 500).unwrap();
            assert!((q.value.re / mass - 1.0).abs() < 1e-6);
        }
    }
}
