use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the function's domain (pole, branch point, unsupported order).
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or expansion could not reach the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Denominator vanished during evaluation.
    #[error("singularity: {0}")]
    Singular(String),
    /// Adaptive ODE step size collapsed.
    #[error("stiffness: {0}")]
    Stiff(String),
    /// Contour quadrature failed to converge.
    #[error("contour quadrature: {0}")]
    Contour(String),
    /// Term-wise assembly produced a non-finite or unbounded result.
    #[error("assembly: {0}")]
    Assembly(String),
    /// The requested asymptotic regime does not apply at this point.
    #[error("region: {0}")]
    Region(String),
    /// No admissible Thomas-Fermi state exists for the requested trap.
    #[error("infeasible trap: {0}")]
    Infeasible(String),
    /// Root finder did not converge or converged to an inadmissible root.
    #[error("solver: {0}")]
    Solver(String),
    /// Invalid user-supplied data (initial data, grids, parameters).
    #[error("invalid data: {0}")]
    Data(String),
}

pub(crate) fn finite(z: num_complex::Complex64, what: &str) -> Result<num_complex::Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Assembly(format!("{what} is not finite")))
    }
}
