//! Information entropy of Coulomb scattering between two electrons.
//!
//! Routines are generic over the scalar type; the aliases below fix it to `f64`.

pub mod amplitudes;
pub mod bessel;
pub mod constants;
pub mod density_matrix;
pub mod eigen;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod quadrature;
pub mod real;
pub mod spin;

pub use amplitudes::{Component, SpinChannel};
pub use entropy::Geometry;
pub use error::{Error, Result};
pub use kinematics::ScatterContext;
pub use real::Real;

pub type Context = kinematics::ScatterContext<f64>;
pub type Grid = geometry::AngularGrid<f64>;
pub type Probabilities = entropy::ProbabilityVector<f64>;
pub type Matrix = eigen::SymmetricMatrix<f64>;
pub type DensityMatrix = density_matrix::MeridianDensityMatrix<f64>;
