//! Run configuration: a JSON document overlaid by command-line flags, then
//! validated into concrete grids.

use crate::CliError;
use pairwave_core::homogeneous::GasParams;
use pairwave_core::trap::{Domain, Potential, TrapModel, DEFAULT_MARGIN};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Output encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// A grid: explicit values, or `count` points from `start` to `stop`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl Grid {
    pub fn log(start: f64, stop: f64, count: usize) -> Grid {
        Grid::Range { start, stop, count, spacing: Spacing::Log }
    }

    /// Materialised values; nonempty, finite and strictly increasing.
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Grid::Values(v) => v.clone(),
            Grid::Range { start, stop, count, spacing } => {
                let n = *count;
                if n == 1 {
                    vec![*start]
                } else {
                    let f = |i: usize| i as f64 / (n - 1) as f64;
                    match spacing {
                        Spacing::Linear => (0..n).map(|i| start + (stop - start) * f(i)).collect(),
                        Spacing::Log => {
                            if !(*start > 0.0 && *stop > 0.0) {
                                return Err(CliError::Config(format!("log grid `{name}` needs positive ends")));
                            }
                            (0..n).map(|i| start * (stop / start).powf(f(i))).collect()
                        }
                    }
                }
            }
        };
        if v.is_empty() {
            return Err(CliError::Config(format!("grid `{name}` is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("grid `{name}` has non-finite values")));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(format!("grid `{name}` must be strictly increasing")));
        }
        Ok(v)
    }
}

/// External potential, in units where the trap is slowly varying with ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `V ≡ value`.
    Constant { value: f64 },
    /// `V = ε²|x|²`.
    Quadratic,
    /// `V = coefficient · (ε|x|)^exponent`.
    Power { coefficient: f64, exponent: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Ball { radius: f64 },
    Cube { half_width: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSpec {
    pub potential: PotentialSpec,
    pub epsilon: f64,
    pub domain: DomainSpec,
    pub grid_points: Option<usize>,
    /// Fraction of the peak density below which local rescaling is refused.
    pub margin: f64,
    /// Centre-of-mass distances sampled along the x axis.
    pub radii: Option<Grid>,
    /// Evaluate Λ with the contour oracle instead of the asymptotic series.
    pub oracle: bool,
}

impl Default for TrapSpec {
    fn default() -> Self {
        TrapSpec {
            potential: PotentialSpec::Quadratic,
            epsilon: 0.02,
            domain: DomainSpec::Ball { radius: 400.0 },
            grid_points: None,
            margin: DEFAULT_MARGIN,
            radii: None,
            oracle: false,
        }
    }
}

impl TrapSpec {
    pub fn domain_extent(&self) -> f64 {
        match self.domain {
            DomainSpec::Ball { radius } => radius,
            DomainSpec::Cube { half_width } => half_width,
        }
    }

    pub fn model(&self, gas: GasParams) -> Result<TrapModel, CliError> {
        let potential = match self.potential {
            PotentialSpec::Constant { value } => Potential::Constant(value),
            PotentialSpec::Quadratic => Potential::Quadratic,
            PotentialSpec::Power { coefficient, exponent } => {
                if !(exponent > 0.0 && coefficient.is_finite()) {
                    return Err(CliError::Config("power potential needs exponent > 0".into()));
                }
                let eps = self.epsilon;
                Potential::Radial(Arc::new(move |r: f64| coefficient * (eps * r).powf(exponent)))
            }
        };
        let domain = match self.domain {
            DomainSpec::Ball { radius } => Domain::Ball { radius },
            DomainSpec::Cube { half_width } => Domain::Cube { half_width },
        };
        if !(self.margin >= 0.0 && self.margin < 1.0) {
            return Err(CliError::Config(format!("trap margin must lie in [0, 1), got {}", self.margin)));
        }
        let mut model =
            TrapModel::new(potential, self.epsilon, domain, gas).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(n) = self.grid_points {
            model.grid_points = n;
        }
        Ok(model)
    }
}

/// Everything a subcommand may read. Absent fields take per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub r_tilde: Option<Grid>,
    pub tau: Option<Grid>,
    pub r: Option<Grid>,
    pub t: Option<Grid>,
    pub m: Option<Vec<i64>>,
    /// Coupling g = 16πaρ₀; alternative to `scattering_length` + `density`.
    pub g: Option<f64>,
    pub scattering_length: Option<f64>,
    pub density: Option<f64>,
    pub trap: Option<TrapSpec>,
    pub tol: Option<f64>,
    pub contour_angle: Option<f64>,
    pub region_thresh: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// Record the generation time in the metadata (breaks byte-identity).
    pub stamp: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => {$( if flags.$f.is_some() { self.$f = flags.$f; } )*};
        }
        take!(
            r_tilde,
            tau,
            r,
            t,
            m,
            g,
            scattering_length,
            density,
            trap,
            tol,
            contour_angle,
            region_thresh,
            threads,
            out,
            format,
            stamp
        );
        self
    }

    pub fn gas(&self) -> Result<GasParams, CliError> {
        let gas = match (self.g, self.scattering_length, self.density) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Config("give either `g` or `scattering_length` + `density`, not both".into()))
            }
            (_, Some(a), Some(rho)) => GasParams::new(a, rho),
            (_, Some(_), None) | (_, None, Some(_)) => {
                return Err(CliError::Config("`scattering_length` and `density` go together".into()))
            }
            (g, None, None) => GasParams::from_coupling(g.unwrap_or(1.0)),
        };
        gas.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn tol(&self) -> Result<Option<f64>, CliError> {
        match self.tol {
            Some(t) if !(t > 0.0 && t < 1.0) => Err(CliError::Config(format!("tolerance must lie in (0, 1), got {t}"))),
            t => Ok(t),
        }
    }

    pub fn grid(&self, field: &Option<Grid>, name: &str, default: Grid) -> Result<Vec<f64>, CliError> {
        field.as_ref().unwrap_or(&default).values(name)
    }

    /// Pole indices: strictly increasing and nonzero.
    pub fn pole_indices(&self) -> Result<Vec<i64>, CliError> {
        let m = self.m.clone().unwrap_or_else(|| (-8..=8).filter(|&m| m != 0).collect());
        if m.is_empty() {
            return Err(CliError::Config("pole index list is empty".into()));
        }
        if m.contains(&0) {
            return Err(CliError::Config("m = 0 is not a pole index".into()));
        }
        if m.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("pole indices must be strictly increasing".into()));
        }
        Ok(m)
    }
}

/// Parses `a:b` into the nonzero integers from a to b.
pub fn parse_m_range(s: &str) -> Result<Vec<i64>, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if b < a {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a..=b).filter(|&m| m != 0).collect())
}
