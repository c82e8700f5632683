pub mod covariance;
pub mod digamma;
pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod poly;
pub mod quad_engine;
pub mod quadrature;
pub mod residue;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};

/// Display labels of the three modes, in index order.
pub const MODE_LABELS: [&str; 3] = ["L", "C", "R"];
