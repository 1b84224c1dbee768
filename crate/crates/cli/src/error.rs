use affinemetrics::GeomError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("identities failed: {}", .0.join(", "))]
    IdentityFailure(Vec<String>),
    #[error("{0}")]
    Numerical(String),
    #[error("cannot write {path}: {reason}")]
    Output { path: String, reason: String },
    /// Some members of a family sweep failed; `code` is the first failure's.
    #[error("{failed} of {total} sweep members failed")]
    Sweep { failed: usize, total: usize, code: u8 },
}

impl CliError {
    /// 0 success, 1 identity failure, 2 parse or configuration error,
    /// 3 geometric degeneracy, 4 invalid initial value problem, 5 numerical
    /// failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::IdentityFailure(_) => 1,
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Geom(g) => geom_exit_code(g),
            CliError::Numerical(_) => 5,
            CliError::Sweep { code, .. } => *code,
        }
    }
}

pub fn geom_exit_code(e: &GeomError) -> u8 {
    match e {
        GeomError::Parse(_)
        | GeomError::Component { .. }
        | GeomError::InvalidDomain(_)
        | GeomError::OutOfDomain { .. } => 2,
        GeomError::Eval(_)
        | GeomError::DegenerateCurve { .. }
        | GeomError::NegativeOrientation { .. }
        | GeomError::ZeroSpeed { .. }
        | GeomError::EuclideanDegenerate { .. }
        | GeomError::NonpositiveTorsion { .. }
        | GeomError::IrregularPoint { .. }
        | GeomError::DegenerateSurfacePoint { .. }
        | GeomError::ZeroDirection
        | GeomError::SingularJacobian { .. }
        | GeomError::NegativeForm { .. } => 3,
        GeomError::InvalidIvp(_) => 4,
        GeomError::Jet(_)
        | GeomError::SingularDenominator { .. }
        | GeomError::Quadrature(_)
        | GeomError::Numerical(_) => 5,
    }
}
