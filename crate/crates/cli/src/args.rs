use std::path::PathBuf;

use affinemetrics::commensurate::InducedOrientation;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "affinemetrics", version, about = "Euclidean and equiaffine invariants of curves and surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fundamental forms, curvature and point class at one surface point.
    SurfaceInfo(SurfaceInfoArgs),
    /// Affine and induced arc length of a surface curve on a sample grid.
    ArclenCompare(ArclenArgs),
    /// Integrate a commensurate curve, or a family of them.
    CommensurateSolve(SolveArgs),
    /// Check the geometric identities at random surface points.
    CheckIdentities(IdentityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Orientation {
    Auto,
    Canonical,
    Reversed,
}

impl From<Orientation> for InducedOrientation {
    fn from(o: Orientation) -> Self {
        match o {
            Orientation::Auto => InducedOrientation::Auto,
            Orientation::Canonical => InducedOrientation::Canonical,
            Orientation::Reversed => InducedOrientation::Reversed,
        }
    }
}

/// Exactly one of a catalog name, inline components or a JSON file.
#[derive(Debug, Clone, Args)]
#[group(skip)]
#[command(group(ArgGroup::new("surface-source").required(true).multiple(false).args(["surface", "surface_expr", "surface_file"])))]
pub struct SurfaceArgs {
    /// Catalog surface: sphere, helicoid, paraboloid, hyperbolic-paraboloid,
    /// hyperboloid or plane.
    #[arg(long)]
    pub surface: Option<String>,
    /// Three components in u and v separated by semicolons.
    #[arg(long, allow_hyphen_values = true)]
    pub surface_expr: Option<String>,
    /// JSON file with "components" and "domain".
    #[arg(long)]
    pub surface_file: Option<PathBuf>,
    /// Parameter domain `u0:u1,v0:v1`; required with --surface-expr,
    /// overrides the catalog domain otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write here instead of stdout; the file is replaced atomically.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceInfoArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Parameter point `u,v`.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ArclenArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// u(t)
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    /// v(t)
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    /// `t0:t1`
    #[arg(long, allow_hyphen_values = true, default_value = "0:1")]
    pub t_range: String,
    /// Number of grid points, including both ends.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Quadrature tolerance per grid interval.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Sign convention for the affine form on indefinite surfaces.
    #[arg(long, value_enum, default_value = "auto")]
    pub orientation: Orientation,
    /// Integrate absolute values when the determinant or the form is negative.
    #[arg(long)]
    pub auto_orient: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Initial point `u0,v0`.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    /// Initial direction angle in the parameter plane.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: f64,
    /// `theta'(0)`, or a sweep `start:stop:step`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub omega0: String,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Relative threshold for the asymptotic-direction stop.
    #[arg(long)]
    pub eps_asym: Option<f64>,
    /// Relative threshold for the singular-denominator stop.
    #[arg(long)]
    pub eps_den: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub orientation: Orientation,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
