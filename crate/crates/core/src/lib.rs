//! Exact computation of the complex-symplectic cohomologies of invariant
//! complexes: Dolbeault, `∂̄^Λ`, Bott–Chern and Aeppli, together with the
//! Hard Lefschetz Condition, the `∂̄∂̄^Λ`-Lemma, harmonic spaces and
//! Dolbeault–Massey triple products.
//!
//! All arithmetic is over `Q(i)`; nothing is ever rounded.

pub mod analysis;
pub mod catalog;
pub mod cohomology;
pub mod error;
pub mod exterior;
pub mod family;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod poly;
pub mod scalar;
pub mod syntax;

pub use error::{Error, Result};
pub use exterior::{Bidegree, Form, MonomialIndex, Side};
pub use family::{OperatorFamily, Witness};
pub use linalg::{ExactMatrix, Subspace};
pub use model::{instantiate, parse_spec, ComplexInstance, ManifoldSpec};
pub use scalar::GaussianRational;
