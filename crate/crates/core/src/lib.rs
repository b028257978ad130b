//! Exact-arithmetic classification of the finite subgroups of SO(q) for
//! nondegenerate ternary quadratic forms over Q and F_p (p odd):
//! embeddability decisions, conjugacy-class invariants, verified generator
//! synthesis, and a brute-force finite-field oracle that cross-checks every
//! claim at small primes.

pub mod conjugacy;
pub mod cyclotomic;
pub mod embedding;
pub mod error;
pub mod field;
pub mod linalg;
pub mod oracle;
pub mod quadform;
pub mod spectra;

pub mod codec;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElem, SquareClass};
pub use quadform::{BinaryForm, Place, TernaryForm};
