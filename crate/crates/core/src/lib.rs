pub mod commensurate;
pub mod curvegeo;
pub mod domain;
pub mod error;
pub mod expr;
pub mod jets;
pub mod numerics;
pub mod surfgeo;

pub use error::{GeomError, Result};
