//! Shooting eigensolver for Sturm–Liouville problems written with the quasi-derivative
//! `y^[1] = p (y' + s y)`.
//!
//! The numerical core is generic over the real scalar type; [`f64`] aliases are
//! provided for the common case.

pub mod analysis;
pub mod boundary;
pub mod coeffs;
pub mod eigenfunctions;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod quasi_ode;
pub mod roots;
pub mod scalar;
pub mod spectrum;
pub mod transmission;

pub use error::{Error, Result};
pub use scalar::{Field, Scalar};

pub type CoefficientSetF64 = coeffs::CoefficientSet<f64>;
pub type PiecewiseFnF64 = coeffs::PiecewiseFn<f64>;
pub type BoundaryConditionF64 = boundary::BoundaryCondition<f64>;
pub type SolverOptionsF64 = quasi_ode::SolverOptions<f64>;
pub type EigenRecordF64 = spectrum::EigenRecord<f64>;
pub type EigenfunctionF64 = eigenfunctions::Eigenfunction<f64>;
pub type Mat2F64 = linalg::Mat2<f64>;
pub type TransmissionProblemF64 = transmission::TransmissionProblem<f64>;
