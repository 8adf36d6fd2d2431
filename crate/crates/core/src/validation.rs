//! The end-to-end invariant suite: ten numbered checks, each comparing a
//! fast path against an independent reference at a fixed tolerance and
//! within a wall-clock budget.

use crate::asymptotics::{lambda_asymptotic, DEFAULT_REGION_THRESHOLD};
use crate::homogeneous::{
    khat_exact, lambda_oracle, riccati_numeric, steady_g0_r, steady_g0_r_quadrature, GasParams, InitialData,
    OracleOptions, ScaledPoint,
};
use crate::poles::{find_poles, pole_estimate, refine_pole, RESIDUAL_TOL};
use crate::specfun::{lommel_modified_identities, lommel_s, polygamma, LommelOrder};
use crate::trap::{
    diffuse, exterior_kernel, lambda_slow, similarity_kernel, solve_tf, Domain, LambdaMethod, Potential, TrapModel,
    DEFAULT_MARGIN,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn unit() -> GasParams {
    GasParams::from_coupling(1.0).unwrap()
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn small_r_law() -> Outcome {
    let lead = PI * PI / 120.0;
    let mut worst: f64 = 0.0;
    for tau in [50.0_f64, 100.0] {
        let p = ScaledPoint::new(1.0, tau).unwrap();
        let o = lambda_oracle(p, OracleOptions::default()).unwrap().re;
        let a = lambda_asymptotic(p, DEFAULT_REGION_THRESHOLD).unwrap().re;
        for v in [o, a] {
            worst = worst.max((tau.powi(4) * v - lead).abs() / lead);
        }
    }
    outcome(worst <= 0.02, format!("max |τ⁴ReΛ − π²/120|/(π²/120) = {worst:.3e} (≤ 2e-2)"))
}

fn master_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for tau in [50.0_f64, 100.0] {
        for r in [1.0, 10.0, tau / 2.0, 2.0 * tau - tau.cbrt(), 3.0 * tau] {
            let p = ScaledPoint::new(r, tau).unwrap();
            let o = lambda_oracle(p, OracleOptions::default()).unwrap();
            if o.norm() < 1e-14 {
                continue;
            }
            let a = lambda_asymptotic(p, DEFAULT_REGION_THRESHOLD).unwrap();
            let rel = (a.re - o.re).abs() / o.re.abs();
            if rel > worst {
                worst = rel;
                at = (r, tau);
            }
        }
    }
    outcome(worst <= 0.05, format!("max rel. error of Re Λ = {worst:.3e} at (r̃, τ) = {at:?} (≤ 5e-2)"))
}

fn closed_form_vs_ode() -> Outcome {
    let gas = unit();
    let ts: Vec<f64> = (0..21).map(|i| 0.5 * i as f64).collect();
    let mut worst: f64 = 0.0;
    for k in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for f0 in [0.0, 0.3] {
            let f0 = Complex64::new(f0, 0.0);
            let num = riccati_numeric(k, &ts, f0, &gas, 1e-10).unwrap();
            for (t, n) in ts.iter().zip(num) {
                worst = worst.max((khat_exact(k, *t, f0, &gas).unwrap() - n).norm());
            }
        }
    }
    outcome(worst < 1e-7, format!("max |K̂_exact − K̂_ODE| = {worst:.3e} (< 1e-7)"))
}

fn steady_state() -> Outcome {
    let gas = unit();
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 3.0] {
        let a = steady_g0_r(r, &gas).unwrap();
        let b = steady_g0_r_quadrature(r, &gas, 1e-10).unwrap();
        worst = worst.max((a - b).abs() / b.abs());
    }
    outcome(worst <= 1e-3, format!("max rel. gap Lommel vs quadrature = {worst:.3e} (≤ 1e-3)"))
}

/// Derivatives by the Cauchy integral on a circle of radius ρ (spectrally
/// accurate for functions analytic in the disc).
fn cauchy_derivs(f: impl Fn(Complex64) -> Complex64, z: Complex64, rho: f64) -> (Complex64, Complex64, Complex64) {
    let n = 64;
    let mut d = [Complex64::new(0.0, 0.0); 3];
    for j in 0..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        let w = Complex64::from_polar(1.0, th);
        let v = f(z + w * rho);
        for (p, slot) in d.iter_mut().enumerate() {
            *slot += v * w.powi(-(p as i32));
        }
    }
    let nf = n as f64;
    (d[0] / nf, d[1] / (nf * rho), d[2] * 2.0 / (nf * rho * rho))
}

fn continuation_identities() -> Outcome {
    let grid = log_grid(0.1, 30.0, 20);
    let mut worst_id: f64 = 0.0;
    for &x in &grid {
        for r in lommel_modified_identities(x).unwrap() {
            worst_id = worst_id.max(r);
        }
    }
    let mut worst_ode: f64 = 0.0;
    for order in [LommelOrder::ZERO_ZERO, LommelOrder::ZERO_THIRD, LommelOrder::ZERO_FOUR] {
        for &x in &grid {
            let z = Complex64::new(x, 0.0);
            let (y, d1, d2) = cauchy_derivs(|w| lommel_s(order, w, 0).unwrap(), z, 0.4 * x);
            let terms = [z * z * d2, z * d1, (z * z - order.nu * order.nu) * y, -z];
            let res: Complex64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            worst_ode = worst_ode.max(res.norm() / scale);
        }
    }
    outcome(
        worst_id < 1e-10 && worst_ode < 1e-8,
        format!("max identity residual = {worst_id:.3e} (< 1e-10), max ODE residual = {worst_ode:.3e} (< 1e-8)"),
    )
}

fn large_argument_seam() -> Outcome {
    let x = 40.0_f64;
    let s = lommel_s(LommelOrder::ZERO_THIRD, Complex64::new(x, 0.0), 0).unwrap().re;
    let approx = 1.0 / x - 8.0 / (9.0 * x.powi(3));
    let rel = (s - approx).abs() / approx;
    outcome(rel <= 1e-4, format!("|S(40) − (1/x − 8/(9x³))|/… = {rel:.3e} (≤ 1e-4)"))
}

fn poles() -> Outcome {
    let t = 10.0;
    let found = find_poles(t, -8..=8).unwrap();
    let mut ok = found.len() == 16;
    let mut worst_res: f64 = 0.0;
    for r in &found {
        match r {
            Ok(p) => {
                worst_res = worst_res.max(p.residual);
                ok &= p.residual < RESIDUAL_TOL && p.k.re * p.k.im > 0.0 && (p.k.re > 0.0) == (p.m > 0);
            }
            Err(_) => ok = false,
        }
    }
    // estimate clause: no m in [−8, 8] has |m|π < t/10 or |m|π > 10t at t = 10;
    // exercise it where it has members
    let in_scope = (-8..=8i64)
        .filter(|&m| m != 0 && ((m.abs() as f64) * PI < t / 10.0 || (m.abs() as f64) * PI > 10.0 * t))
        .count();
    let mut worst_est: f64 = 0.0;
    for (m, tt) in [(1, 100.0), (2, 100.0), (3, 100.0), (-2, 100.0), (7, 1.0), (20, 1.0), (-50, 1.0)] {
        let p = refine_pole(m, tt).unwrap();
        let e = pole_estimate(m, tt).unwrap();
        worst_est = worst_est.max((p.eta - e).norm() / p.eta.norm());
    }
    ok &= worst_est < 0.01;
    outcome(
        ok,
        format!(
            "{} poles, max residual = {worst_res:.3e} (< 1e-10), quadrants I/III; estimate clause has {in_scope} members at t = 10, \
             max estimate gap elsewhere = {worst_est:.3e} (< 1e-2)",
            found.len()
        ),
    )
}

fn trap_suite() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    // constant potential ≡ homogeneous gas
    let level = -0.25;
    let model = TrapModel::new(Potential::Constant(level), 0.01, Domain::Cube { half_width: 50.0 }, unit()).unwrap();
    let tf = solve_tf(&model, 1e-12).unwrap();
    let flat = [[0.0; 3], [10.0, -3.0, 7.0], [-49.0, 0.0, 1.0]].iter().all(|x| tf.phi0(x) == 1.0);
    let mut equal = true;
    for (r, t) in [(1.0, 100.0), (10.0, 50.0), (150.0, 50.0)] {
        let a = lambda_slow(&[1.0, 2.0, 3.0], r, t, &tf, DEFAULT_MARGIN, LambdaMethod::Asymptotic).unwrap();
        let b = lambda_asymptotic(ScaledPoint::new(r, t).unwrap(), DEFAULT_REGION_THRESHOLD).unwrap();
        equal &= a == b;
    }
    ok &= flat && equal && tf.zeta == 1.0 && tf.energy == 0.25 * model.gas.g() + level;
    notes.push(format!("constant: φ₀≡1 {flat}, Λ identical {equal}"));

    // quadratic trap invariants
    let eps = 0.02;
    let model = TrapModel::new(Potential::Quadratic, eps, Domain::Ball { radius: 400.0 }, unit()).unwrap();
    let tf = solve_tf(&model, 1e-10).unwrap();
    let omega = model.omega();
    let mu = (omega * 0.5 * 15.0 * eps.powi(3) / (8.0 * PI)).powf(0.4);
    let norm = {
        // independent check of the normalization with the closed-form integral
        let rb = tf.threshold.sqrt() / eps;
        4.0 * PI * (tf.threshold * rb.powi(3) / 3.0 - eps * eps * rb.powi(5) / 5.0) / (0.5 * omega)
    };
    // μ = (g/2)ζ + ζ_e follows from integrating gφ₀⁴/2 = (μ − V)φ₀²; it ties the
    // bisected threshold to both integrals, and with E = μ − gζ/4 gives the energy relation
    let g = model.gas.g();
    let e_rel = ((tf.threshold - (0.5 * g * tf.zeta + tf.zeta_e)).abs() / tf.threshold)
        .max((tf.energy - (tf.threshold - 0.25 * g * tf.zeta)).abs() / tf.energy.abs());
    let rb = tf.tf_radius().unwrap();
    let edge = tf.phi0_sq(&[rb, 0.0, 0.0]).max(tf.phi0_sq(&[rb * (1.0 + 1e-6), 0.0, 0.0]));
    let inv = (norm - 1.0).abs() < 1e-8 && e_rel < 1e-8 && edge < 1e-8 && (tf.threshold / mu - 1.0).abs() < 1e-8;
    ok &= inv;
    notes.push(format!(
        "quadratic: |norm−1| = {:.1e}, E-relation {e_rel:.1e}, φ₀² on and beyond ∂ℛ = {edge:.1e}, μ vs closed form {:.1e}",
        (norm - 1.0).abs(),
        (tf.threshold / mu - 1.0).abs()
    ));

    // exterior diffusion of Gaussian data
    let (amp, sigma) = (1.0, 1.0);
    let init = InitialData::Gaussian { amplitude: amp, sigma };
    let mut worst_conv: f64 = 0.0;
    for t in [0.05, 1.0, 20.0, 100.0] {
        let w2 = sigma * sigma + 4.0 * t;
        for r in [0.0, 0.5 * w2.sqrt(), 2.0 * w2.sqrt()] {
            let v = diffuse(r, t, &init).unwrap();
            let o = amp * (sigma * sigma / w2).powf(1.5) * (-r * r / (2.0 * w2)).exp();
            worst_conv = worst_conv.max((v - o).abs() / o);
        }
    }
    let t = 100.0 * sigma * sigma;
    let mut worst_sim: f64 = 0.0;
    for r in [t.sqrt(), 2.0 * t.sqrt(), (8.0 * t).sqrt()] {
        let v = diffuse(r, t, &init).unwrap();
        worst_sim = worst_sim.max((v / similarity_kernel(r, t, &init).unwrap() - 1.0).abs());
    }
    let outside = exterior_kernel(&[2.0 * rb, 0.0, 0.0], 3.0, 5.0, &init, &tf).is_ok();
    ok &= worst_conv < 1e-8 && worst_sim < 0.02 && outside;
    notes.push(format!("exterior: convolution {worst_conv:.1e} (< 1e-8), similarity {worst_sim:.1e} (< 2e-2)"));
    outcome(ok, notes.join("; "))
}

fn continuation_single_valued() -> Outcome {
    let o = LommelOrder::ZERO_THIRD;
    let mut worst: f64 = 0.0;
    for g in log_grid(0.2, 30.0, 10) {
        let z = Complex64::new(g, 0.0);
        let i = Complex64::i();
        // γe^{−i3π/2}[(iγe^{−i3π/2})^{-1} − S(iγe^{−i3π/2})], iγe^{−i3π/2} = γe^{−iπ}
        let lhs = i * g * (1.0 / (-g) - lommel_s(o, z, -1).unwrap());
        // γe^{i3π/2}[(iγe^{i3π/2})^{-1} − S(iγe^{i3π/2})], iγe^{i3π/2} = γe^{2iπ}
        let rhs = -i * g * (1.0 / g - lommel_s(o, z, 2).unwrap());
        worst = worst.max((lhs - rhs).norm() / lhs.norm());
    }
    outcome(worst < 1e-10, format!("max rel. gap between continuations = {worst:.3e} (< 1e-10)"))
}

fn polygamma_values() -> Outcome {
    let one = Complex64::new(1.0, 0.0);
    let zeta3 = 1.202_056_903_159_594_3;
    let a = (polygamma(3, one).unwrap().re - PI.powi(4) / 15.0).abs();
    let b = (polygamma(2, one).unwrap().re + 2.0 * zeta3).abs();
    outcome(a < 1e-12 && b < 1e-12, format!("|ψ‴(1) − π⁴/15| = {a:.1e}, |ψ″(1) + 2ζ(3)| = {b:.1e} (< 1e-12)"))
}

/// Result of one numbered check.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    /// Tolerances met and budget respected.
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Check {
    /// One-line report, `PASS`/`FAIL` first.
    pub fn line(&self) -> String {
        format!(
            "{} check {:>2} ({}): {} [{:.2} s, budget {} s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

type Runner = fn() -> Outcome;

const SUITE: [(&str, Runner, u64); 10] = [
    ("small-r̃ law", small_r_law, 60),
    ("oracle vs asymptotics", master_suite, 600),
    ("closed form vs ODE", closed_form_vs_ode, 10),
    ("steady-state kernel", steady_state, 30),
    ("continuation identities", continuation_identities, 5),
    ("large-argument seam", large_argument_seam, 1),
    ("propagator poles", poles, 5),
    ("trap suite", trap_suite, 60),
    ("continuation single-valuedness", continuation_single_valued, 1),
    ("polygamma values", polygamma_values, 1),
];

/// Number of checks in the suite.
pub const SUITE_LEN: usize = SUITE.len();

/// Runs check `id` (1-based).
pub fn run_check(id: usize) -> Option<Check> {
    let (name, run, budget) = *SUITE.get(id.checked_sub(1)?)?;
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    Some(Check { id, name, pass: out.pass && elapsed <= budget, detail: out.detail, elapsed, budget })
}

/// Runs the whole suite in order, calling `report` after each check.
pub fn run_suite(mut report: impl FnMut(&Check)) -> Vec<Check> {
    (1..=SUITE_LEN).filter_map(run_check).inspect(|c| report(c)).collect()
}
