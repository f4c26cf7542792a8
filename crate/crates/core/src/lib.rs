//! Homological fillings of integer 1-cycles in weighted simplicial complexes.

pub mod chain;
pub mod chart;
pub mod complex;
pub mod error;
pub mod homology;
pub mod io;
pub mod nerve;
pub mod corpus;
pub mod pipeline;
pub mod scalar;

pub use chain::{Chain, Simplex};
pub use complex::WeightedComplex;
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Complex64 = WeightedComplex<f64>;
pub type Complex32 = WeightedComplex<f32>;
pub type Instance64 = pipeline::Instance<f64>;
pub type Instance32 = pipeline::Instance<f32>;
