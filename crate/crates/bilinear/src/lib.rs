//! Exact growth analysis for bilinear systems.
//!
//! A *bilinear system* is a finite set of bilinear operators on `Q^d` together
//! with a finite set of seed vectors. Combining `n` seeds along a binary tree
//! yields a vector; the growth function `g(n)` is the largest entry over all
//! combinations of size `n`, and the growth rate of the system is
//! `λ = limsup g(n)^{1/n}`.
//!
//! The crate computes `g` exactly with big rationals, produces certified lower
//! bounds on `λ` from linear patterns and certified upper bounds from weight
//! and graded certificates, decides threshold questions `λ > θ` /
//! `λ ≤ θ` where the certificates resolve them, and builds the classical
//! reductions (matrix products, joint spectral radius, matrix mortality) as
//! explicit bilinear systems at desk scale.
//!
//! Modules:
//! - [`scalar`]: exact rational arithmetic plus directed floating-point roots.
//! - [`linalg`]: dense vectors/matrices over the rationals.
//! - [`core`]: systems, composition trees, exact growth tables, liveness.
//! - [`patterns`]: linear patterns, their matrices, and lower-bound machinery.
//! - [`spectra`]: spectral radius and joint spectral radius enclosures.
//! - [`bounds`]: certificates, threshold decisions, limit diagnostics.
//! - [`reductions`]: embeddings of matrix problems and system transforms.

pub mod bounds;
pub mod core;
pub mod error;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod linalg;
pub mod patterns;
pub mod reductions;
pub mod scalar;
pub mod spectra;

pub use crate::error::{Error, Result};
