//! Computational toolkit for Markov-type cubic surfaces
//! `x^2 + y^2 + z^2 + Exyz - Ax - By - Cz - D = 0`.
//!
//! Exact polynomial arithmetic modulo the surface, the Jacobian Poisson
//! bracket with Casimir `P`, closed-form flows of the three coordinate
//! Hamiltonian fields, singularity classification with model-germ
//! decompositions, Markov triple enumeration and an interpolating builder for
//! symplectic automorphisms prescribed on finitely many Markov triples.

pub mod error;
pub mod flows;
pub mod interp;
pub mod liegen;
pub mod markov;
pub mod num;
pub mod poisson;
pub mod poly;
pub mod singular;
pub mod surface;
pub mod tame;

pub use error::{Error, Result};
pub use num::{BigComplex, BigReal};
pub use poly::{Mono, NormalPoly, Poly};
pub use surface::{NumParams, ParamsSpec, SurfaceParams};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;
