//! Proximal point methods for monotone vector fields on Hadamard spaces.
//!
//! The crate provides three model spaces (Euclidean `ℝⁿ`, the hyperbolic
//! upper half-plane and finite metric trees), tangent-cone calculus built on
//! Alexandrov angles, resolvents of monotone vector fields, and the proximal
//! point, Mann and Halpern iterations together with schedule and trace
//! diagnostics.

pub mod algorithms;
pub mod config;
pub mod error;
pub mod geometry;
pub mod prox;
pub mod sampling;
pub mod spaces;
pub mod suite;
pub mod tangent;
pub mod tolerance;

pub use error::{Error, Result};
pub use geometry::HadamardSpace;
