//! Fukaya categories of flat symplectic tori with B-fields.
//!
//! Objects are products of affine circles on `T^{2n} = (R^2/Z^2)^n` carrying a
//! grading shift and a flat `U(1)` holonomy. Morphism spaces are spanned by
//! transverse intersection points, and the structure maps `μ^k` are convergent
//! sums over polygon classes found by exact lattice enumeration in the
//! universal cover. The crate also carries numerical harnesses for the effect
//! of Lagrangian isotopies on weights and for the relative de Rham pairing.

pub mod error;
pub mod rational;
pub mod flat_torus;
pub mod grading;
pub mod polygon;
pub mod ainfinity;
pub mod isotopy;
pub mod expr;
pub mod quadrature;
pub mod circle;
pub mod derham;

pub use error::{Error, Result};
pub use flat_torus::{AffineLine, Brane, Direction, Generator, TorusAmbient};
pub use rational::Q;
