//! Serialized document types. Every JSON document carries
//! `"schema": "affinemetrics/1"`.

use affinemetrics::commensurate::{SolveOptions, Termination, TraceNode};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "affinemetrics/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

/// Also the format of `--surface-file`, where `name` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub components: [String; 3],
    pub domain: DomainSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceInfoDoc {
    pub schema: String,
    pub command: String,
    pub surface: SurfaceSpec,
    pub u: f64,
    pub v: f64,
    /// `(E, F, G)`
    pub first_fundamental: [f64; 3],
    /// `(e, f, g)` with respect to `normal`.
    pub second_fundamental: [f64; 3],
    pub normal: [f64; 3],
    /// `(l, m, n)`
    pub lmn: [f64; 3],
    pub gauss_curvature: f64,
    /// Coefficients `(a, b, c)` of `a du^2 + 2b du dv + c dv^2`.
    pub affine_first_fundamental: [f64; 3],
    /// `-1` when the raw form was negative definite and has been negated.
    pub orientation: f64,
    pub definiteness: String,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArclenRow {
    pub t: f64,
    pub s_alpha: f64,
    pub s_sigma: f64,
    pub integrand_alpha: f64,
    pub integrand_sigma: f64,
    pub degenerate_alpha: bool,
    pub degenerate_sigma: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArclenDoc {
    pub schema: String,
    pub command: String,
    pub surface: SurfaceSpec,
    pub u: String,
    pub v: String,
    pub t_range: [f64; 2],
    pub tol: f64,
    pub auto_orient: bool,
    /// Sign applied to the affine form along the curve.
    pub orientation: f64,
    pub rows: Vec<ArclenRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvpSpec {
    pub surface: SurfaceSpec,
    pub u0: f64,
    pub v0: f64,
    pub theta0: f64,
    pub omega0: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub schema: String,
    pub command: String,
    pub ivp: IvpSpec,
    pub options: SolveOptions,
    pub orientation: f64,
    pub termination: Termination,
    pub max_residual: f64,
    pub node_count: usize,
    pub nodes: Vec<TraceNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub checked: usize,
    pub skipped: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesDoc {
    pub schema: String,
    pub command: String,
    pub surface: SurfaceSpec,
    pub samples: usize,
    pub seed: u64,
    pub identities: Vec<IdentityResult>,
    pub passed: bool,
}
