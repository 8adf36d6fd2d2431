//! Table builders for each subcommand. Grid points are evaluated in parallel
//! and collected in grid order.

use crate::config::{Grid, RunConfig, TrapSpec};
use crate::output::{Cell, Table};
use crate::CliError;
use pairwave_core::asymptotics::{lambda_asymptotic_with, AsymptoticOptions, Region};
use pairwave_core::homogeneous::{lambda_oracle, steady_g0_r, steady_g0_r_quadrature, OracleOptions, ScaledPoint};
use pairwave_core::poles::{pole_estimate, refine_pole};
use pairwave_core::trap::{local_gas, solve_tf};
use pairwave_core::{Complex64, Error};
use rayon::prelude::*;

/// Oracle results below this magnitude carry no meaningful relative error.
const ORACLE_FLOOR: f64 = 1e-14;

fn oracle_options(cfg: &RunConfig) -> Result<OracleOptions, CliError> {
    let mut o = OracleOptions::default();
    if let Some(t) = cfg.tol()? {
        o.tol = t;
    }
    if let Some(a) = cfg.contour_angle {
        if !(a > 0.0 && a < std::f64::consts::FRAC_PI_4) {
            return Err(CliError::Config(format!("contour angle must lie in (0, π/4), got {a}")));
        }
        o.contour_angle = a;
    }
    Ok(o)
}

fn asymptotic_options(cfg: &RunConfig) -> Result<AsymptoticOptions, CliError> {
    let mut o = AsymptoticOptions::default();
    if let Some(t) = cfg.tol()? {
        o.tol = t;
    }
    if let Some(c) = cfg.region_thresh {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CliError::Config(format!("region threshold must be positive, got {c}")));
        }
        o.c_thresh = c;
    }
    Ok(o)
}

fn region_profile(regions: &[Region]) -> String {
    let count = |r: Region| regions.iter().filter(|&&x| x == r).count();
    format!("I:{} II:{} III:{}", count(Region::I), count(Region::II), count(Region::III))
}

fn complex_cells(z: Option<Complex64>) -> [Cell; 2] {
    [z.map(|z| z.re).into(), z.map(|z| z.im).into()]
}

fn flag_text(errors: &[(&str, &Error)]) -> String {
    errors.iter().map(|(what, e)| format!("{what}: {e}")).collect::<Vec<_>>().join("; ")
}

/// Λ from the asymptotic series and from the contour oracle on `r̃ × τ`.
pub fn lambda_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let r_tilde = cfg.grid(&cfg.r_tilde, "r_tilde", Grid::Values(vec![1.0, 10.0, 50.0, 100.0, 150.0]))?;
    let tau = cfg.grid(&cfg.tau, "tau", Grid::Values(vec![50.0, 100.0]))?;
    if r_tilde[0] <= 0.0 || tau[0] <= 0.0 {
        return Err(CliError::Config("r_tilde and tau must be positive".into()));
    }
    let (ao, oo) = (asymptotic_options(cfg)?, oracle_options(cfg)?);
    let points: Vec<(f64, f64)> = r_tilde.iter().flat_map(|&r| tau.iter().map(move |&t| (r, t))).collect();
    let results: Vec<_> = points
        .par_iter()
        .map(|&(r, t)| {
            let pt = ScaledPoint::new(r, t).expect("validated grid");
            (lambda_asymptotic_with(pt, ao), lambda_oracle(pt, oo))
        })
        .collect();

    let mut table = Table::new(
        "lambda-table",
        vec![
            "r_tilde",
            "tau",
            "re_asymptotic",
            "im_asymptotic",
            "re_oracle",
            "im_oracle",
            "rel_error",
            "terms",
            "region_profile",
            "low_confidence",
            "flag",
        ],
    );
    table.meta("rel_error", "|Re asymptotic - Re oracle| / |Re oracle|; empty when |oracle| < 1e-14");
    table.meta("region_threshold", ao.c_thresh);
    table.meta("asymptotic_tol", ao.tol);
    table.meta("oracle_tol", oo.tol);
    table.meta("contour_angle", oo.contour_angle);
    for (&(r, t), (a, o)) in points.iter().zip(results) {
        let mut errors = Vec::new();
        if let Err(e) = &a {
            errors.push(("asymptotic", e));
        }
        if let Err(e) = &o {
            errors.push(("oracle", e));
        }
        let flag = flag_text(&errors);
        let av = a.as_ref().ok();
        let ov = o.as_ref().ok().copied();
        let rel = match (av, ov) {
            (Some(a), Some(o)) if o.norm() >= ORACLE_FLOOR => Some((a.value.re - o.re).abs() / o.re.abs()),
            _ => None,
        };
        let mut row = vec![Cell::Float(r), Cell::Float(t)];
        row.extend(complex_cells(av.map(|a| a.value)));
        row.extend(complex_cells(ov));
        row.push(rel.into());
        row.push(av.map_or(Cell::Empty, |a| Cell::Int(a.terms.into())));
        row.push(av.map_or(Cell::Empty, |a| Cell::Text(region_profile(&a.regions))));
        row.push(av.map_or(Cell::Empty, |a| Cell::Bool(a.low_confidence)));
        let flagged = !flag.is_empty();
        row.push(Cell::Text(flag));
        table.push(row, flagged);
    }
    Ok(table)
}

/// Steady kernel g₀(r) from the Lommel form, cross-checked by quadrature.
pub fn steady(cfg: &RunConfig) -> Result<Table, CliError> {
    let gas = cfg.gas()?;
    let r = cfg.grid(&cfg.r, "r", Grid::log(0.05, 20.0, 25))?;
    if r[0] <= 0.0 {
        return Err(CliError::Config("steady kernel grid must exclude r ≤ 0".into()));
    }
    let tol = cfg.tol()?.unwrap_or(1e-10);
    let results: Vec<_> = r.par_iter().map(|&x| (steady_g0_r(x, &gas), steady_g0_r_quadrature(x, &gas, tol))).collect();

    let mut table = Table::new("steady", vec!["r", "g0", "g0_quadrature", "rel_gap", "flag"]);
    table.meta("g", gas.g());
    table.meta("quadrature_tol", tol);
    for (&x, (a, q)) in r.iter().zip(results) {
        let mut errors = Vec::new();
        if let Err(e) = &a {
            errors.push(("lommel", e));
        }
        if let Err(e) = &q {
            errors.push(("quadrature", e));
        }
        let (a, q) = (a.as_ref().ok().copied(), q.as_ref().ok().copied());
        let gap = a.zip(q).map(|(a, q)| (a - q).abs() / q.abs());
        let flag = flag_text(&errors);
        let flagged = !flag.is_empty();
        table.push(vec![Cell::Float(x), a.into(), q.into(), gap.into(), Cell::Text(flag)], flagged);
    }
    Ok(table)
}

fn quadrant(k: Complex64) -> &'static str {
    match (k.re > 0.0, k.im > 0.0) {
        (true, true) => "I",
        (false, true) => "II",
        (false, false) => "III",
        (true, false) => "IV",
    }
}

/// Poles of the steady-state propagator for each `t` and `m`.
pub fn poles(cfg: &RunConfig) -> Result<Table, CliError> {
    let ts = cfg.grid(&cfg.t, "t", Grid::Values(vec![10.0]))?;
    if ts[0] <= 0.0 {
        return Err(CliError::Config("pole search needs t > 0".into()));
    }
    let ms = cfg.pole_indices()?;
    if cfg.g.is_some_and(|g| g != 1.0) || cfg.scattering_length.is_some() || cfg.density.is_some() {
        return Err(CliError::Config("poles are tabulated in units g = 1; rescale times as t → g t".into()));
    }
    let points: Vec<(f64, i64)> = ts.iter().flat_map(|&t| ms.iter().map(move |&m| (t, m))).collect();
    let results: Vec<_> = points.par_iter().map(|&(t, m)| (pole_estimate(m, t), refine_pole(m, t))).collect();

    let mut table = Table::new(
        "poles",
        vec![
            "t",
            "m",
            "re_eta_est",
            "im_eta_est",
            "re_eta",
            "im_eta",
            "re_k",
            "im_k",
            "residual",
            "quadrant",
            "iterations",
            "flag",
        ],
    );
    table.meta("equation", "(t/2) sinh(2 eta) - 2 i eta = m pi, k = sinh(eta)");
    table.meta("g", 1.0);
    for (&(t, m), (est, pole)) in points.iter().zip(results) {
        let mut row = vec![Cell::Float(t), Cell::Int(m)];
        row.extend(complex_cells(est.ok()));
        let flag = match &pole {
            Ok(p) => {
                row.extend(complex_cells(Some(p.eta)));
                row.extend(complex_cells(Some(p.k)));
                row.push(Cell::Float(p.residual));
                row.push(Cell::Text(quadrant(p.k).into()));
                row.push(Cell::Int(p.iterations as i64));
                String::new()
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                format!("refinement: {e}")
            }
        };
        let flagged = !flag.is_empty();
        row.push(Cell::Text(flag));
        table.push(row, flagged);
    }
    Ok(table)
}

/// Thomas–Fermi profile along the x axis, with local scales and optional Λ.
pub fn trap_profile(cfg: &RunConfig) -> Result<Table, CliError> {
    let gas = cfg.gas()?;
    let spec = cfg.trap.clone().unwrap_or_default();
    let model = spec.model(gas)?;
    let tol = cfg.tol()?.unwrap_or(1e-10);
    let tf = solve_tf(&model, tol).map_err(|e| match e {
        Error::Infeasible(m) => CliError::Infeasible(m),
        other => CliError::Infeasible(other.to_string()),
    })?;
    let radii = cfg.grid(
        &spec.radii,
        "trap.radii",
        Grid::Range { start: 0.0, stop: spec.domain_extent(), count: 41, spacing: Default::default() },
    )?;
    let lambda_grid = match (&cfg.r, &cfg.t) {
        (None, None) => Vec::new(),
        (Some(_), None) | (None, Some(_)) => {
            return Err(CliError::Config("Λ sampling needs both `r` and `t` grids".into()));
        }
        (Some(r), Some(t)) => {
            let (r, t) = (r.values("r")?, t.values("t")?);
            if r[0] <= 0.0 || t[0] <= 0.0 {
                return Err(CliError::Config("Λ sampling needs r > 0 and t > 0".into()));
            }
            r.iter().flat_map(|&r| t.iter().map(move |&t| (r, t))).collect()
        }
    };
    let (ao, oo) = (asymptotic_options(cfg)?, oracle_options(cfg)?);
    let use_oracle = spec.oracle;

    let mut table = Table::new(
        "trap-profile",
        vec!["R", "phi0", "in_region", "r_scale", "tau_scale", "r", "t", "re_lambda", "im_lambda", "flag"],
    );
    table.meta("g", gas.g());
    table.meta("trap", serde_json::to_value(&spec).map_err(|e| CliError::Config(e.to_string()))?);
    table.meta("E", tf.energy);
    table.meta("zeta", tf.zeta);
    table.meta("zeta_e", tf.zeta_e);
    table.meta("mu", tf.threshold);
    table.meta("norm_error", tf.norm_error);
    table.meta("fills_domain", tf.fills_domain);
    table.meta("energy_relation_gap", (tf.energy - (0.25 * gas.g() * tf.zeta + tf.zeta_e)).abs());
    table.meta("lambda_method", if use_oracle { "oracle" } else { "asymptotic" });
    table.meta("r_scale", "sqrt(g phi0(R)^2): r~ = r_scale r; tau_scale = g phi0(R)^2: tau = tau_scale t");

    let rows: Vec<Vec<(Vec<Cell>, bool)>> =
        radii.par_iter().map(|&big_r| profile_rows(big_r, &tf, &spec, &lambda_grid, ao, oo, use_oracle)).collect();
    for (row, flagged) in rows.into_iter().flatten() {
        table.push(row, flagged);
    }
    Ok(table)
}

fn profile_rows(
    big_r: f64,
    tf: &pairwave_core::trap::TfSolution,
    spec: &TrapSpec,
    lambda_grid: &[(f64, f64)],
    ao: AsymptoticOptions,
    oo: OracleOptions,
    use_oracle: bool,
) -> Vec<(Vec<Cell>, bool)> {
    let pos = [big_r, 0.0, 0.0];
    let phi0 = tf.phi0(&pos);
    let inside = tf.region().contains(&pos);
    let local = if inside { local_gas(&pos, tf, spec.margin).ok() } else { None };
    let head = |r: Option<f64>, t: Option<f64>| {
        vec![
            Cell::Float(big_r),
            Cell::Float(phi0),
            Cell::Bool(inside),
            local.map(|g| g.g().sqrt()).into(),
            local.map(|g| g.g()).into(),
            r.into(),
            t.into(),
        ]
    };
    if lambda_grid.is_empty() {
        let mut row = head(None, None);
        row.extend([Cell::Empty, Cell::Empty, Cell::Text(String::new())]);
        return vec![(row, false)];
    }
    lambda_grid
        .iter()
        .map(|&(r, t)| {
            let mut row = head(Some(r), Some(t));
            let Some(g) = local else {
                row.extend([Cell::Empty, Cell::Empty, Cell::Text(String::new())]);
                return (row, false);
            };
            let value = ScaledPoint::from_physical(r, t, &g).and_then(|pt| {
                if use_oracle {
                    lambda_oracle(pt, oo)
                } else {
                    lambda_asymptotic_with(pt, ao).map(|a| a.value)
                }
            });
            match value {
                Ok(v) => {
                    row.extend(complex_cells(Some(v)));
                    row.push(Cell::Text(String::new()));
                    (row, false)
                }
                Err(e) => {
                    row.extend([Cell::Empty, Cell::Empty, Cell::Text(format!("lambda: {e}"))]);
                    (row, true)
                }
            }
        })
        .collect()
}
