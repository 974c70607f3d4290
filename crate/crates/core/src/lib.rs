//! Temporary build stub while modules land.
pub mod elliptic;
pub mod error;
pub mod field;
pub mod lattice;
pub mod moduli;
pub mod spectral;
pub mod validate;

pub use error::{CoreError, Result};
pub use field::{Direction, Field, ScalarField};
pub use lattice::LatticeSpec;
pub use moduli::{ModuliPoint, ModuliTangent};
