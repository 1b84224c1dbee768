use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::jets::JetError;

/// Errors raised by the geometric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("{what} component {index} failed to parse: {source}")]
    Component { what: &'static str, index: usize, source: ParseError },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("parameter {point:?} lies outside the domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("curve is affinely degenerate at t = {t} (det = {det:e})")]
    DegenerateCurve { t: f64, det: f64 },
    #[error("negative orientation at t = {t} (det = {det:e}); reverse the parametrization or use the absolute value")]
    NegativeOrientation { t: f64, det: f64 },
    #[error("zero speed at t = {t}")]
    ZeroSpeed { t: f64 },
    /// Curvature vanishes, so the torsion is undefined; speed and curvature
    /// are still reported.
    #[error("curve is Euclidean-degenerate at t = {t} (speed {speed}, curvature {curvature:e})")]
    EuclideanDegenerate { t: f64, speed: f64, curvature: f64 },
    #[error("torsion {tau:e} at t = {t} is not positive")]
    NonpositiveTorsion { t: f64, tau: f64 },
    #[error("surface is irregular at ({u}, {v})")]
    IrregularPoint { u: f64, v: f64 },
    #[error("surface point ({u}, {v}) is degenerate (ln - m^2 = {discriminant:e})")]
    DegenerateSurfacePoint { u: f64, v: f64, discriminant: f64 },
    #[error("zero tangent direction")]
    ZeroDirection,
    #[error("jacobian is singular (det = {det:e})")]
    SingularJacobian { det: f64 },
    #[error("affine first fundamental form is negative on the tangent at t = {t} ({value:e})")]
    NegativeForm { t: f64, value: f64 },
    #[error("denominator {denominator:e} is below the threshold {threshold:e}")]
    SingularDenominator { denominator: f64, threshold: f64 },
    #[error("invalid initial value problem: {0}")]
    InvalidIvp(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
