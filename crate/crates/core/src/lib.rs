//! Finite-dimensional operator-algebra workbench.
//!
//! Elements live in direct sums of complex matrix blocks. On top of the
//! Hermitian eigensolver the crate builds order-convergence certificates,
//! projection-lattice and monotone-closure machinery, projection-valued
//! spectral measures of normal elements, and polar decomposition through the
//! regularized sequence `x(1/n + |x|)^{-1}` checked against a direct oracle.
//!
//! Everything is generic over the real scalar ([`Real`]: `f32` or `f64`);
//! the aliases at the crate root fix double precision.

pub mod algebra;
pub mod element;
pub mod error;
pub mod joint;
pub mod lattice;
pub mod matrix;
pub mod order;
pub mod polar;
pub mod scalar;
pub mod spectral;
pub mod suites;
pub mod tolerance;

pub use algebra::{
    adjoint, eigh_hermitian, loewner_leq, operator_norm, positive_sqrt, pseudo_inverse_on_range,
    range_projection, HermitianEigenSystem, Projection,
};
pub use element::{AlgebraElement, Signature};
pub use error::{AlgebraError, Result};
pub use matrix::Matrix;
pub use scalar::{Real, Scalar};
pub use tolerance::ToleranceConfig;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision algebra element.
pub type Element = AlgebraElement<f64>;
/// Single-precision algebra element.
pub type Element32 = AlgebraElement<f32>;
pub type Tolerances = ToleranceConfig<f64>;
