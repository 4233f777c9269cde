//! Exact computations for Lie-Yamaguti algebras.
//!
//! * [`linalg`]: rational scalars, dense matrices, rank/kernel/quotient.
//! * [`algebra`]: algebras by structure constants, identity checks, constructors,
//!   homomorphisms and derivations.
//! * [`representation`]: representations `(ρ, D, θ)`, semi-direct products.
//! * [`cohomology`]: cochains, coboundaries and cohomology dimensions.
//! * [`bundle`]: locally trivial algebra bundles over a sampled atlas.
//! * [`json`]: the JSON interchange formats.

#![allow(clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod algebra;
pub mod bundle;
pub mod cohomology;
pub mod json;
pub mod linalg;
pub mod representation;

pub use algebra::{AlgebraError, Axiom, AxiomReport, LyAlgebra};
pub use linalg::{Matrix, Rational, SubspaceBasis};
