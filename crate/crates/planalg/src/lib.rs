//! Fixed-point towers of Hopf C*-algebra coactions on finite dimensional
//! C*-algebras.
//!
//! The crate builds the loop-basis C*-algebra structure on tensor powers
//! `A^{⊗n}`, coactions `v_n` induced by a coaction `v : A → A ⊗ H`, the
//! fixed-point algebras `Q_n(v)` with their Poincaré series, and runs
//! machine checks of the identities (coaction axioms, equivariance,
//! Temperley-Lieb, Pimsner-Popa, commuting squares, filtered forms) that
//! make the graded union of the `Q_n(v)` a spherical C*-planar algebra.

pub mod algebra;
pub mod coaction;
pub mod error;
pub mod group;
pub mod hopf;
pub mod htensor;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod runner;
pub mod specfile;
pub mod tower;

pub mod bundled;

pub use error::{Error, Result};
