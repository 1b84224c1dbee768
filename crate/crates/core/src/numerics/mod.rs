//! Numerical kernels: quadrature, ODE integration, root finding and finite
//! differences.

pub mod diff;
pub mod ode;
pub mod quad;
pub mod root;

pub use diff::finite_diff;
pub use ode::{ode_solve, Direction, Event, EventHit, Method, OdeError, OdeOptions, OdeSolution, OdeStatus, RhsError};
pub use quad::{quad_adaptive, quad_adaptive_with, QuadConfig, QuadError, QuadResult};
pub use root::{find_root_bracketed, RootError};
