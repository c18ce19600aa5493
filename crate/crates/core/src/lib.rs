//! Tensor restriction, degeneration and asymptotic rank bounds.
//!
//! Tensors live over one of three scalar domains: exact Gaussian rationals,
//! polynomials in a formal ε with Gaussian-rational coefficients, or
//! floating complex numbers. Everything that claims a mathematical fact is
//! verified in exact arithmetic; floating point is used only for spectra
//! and for heuristic search.

pub mod asymptotic;
pub mod catalog;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod obstructions;
pub mod preorder;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Domain, EpsPoly, QComplex, Scalar};
pub use tensor::{GroupingSpec, Tensor};
