//! Exact Frobenius and Cartier semilinear algebra over finite fields.

pub mod artinian;
pub mod cli;
pub mod crystal;
pub mod duality;
pub mod error;
pub mod field;
pub mod local;
pub mod matrix;
pub mod pid;
pub mod poly;
pub mod random;
pub mod semilinear;
pub mod suite;

pub use artinian::{ArtinRing, FinModule};
pub use crystal::{Kind, Nilpotency, StructuredModule};
pub use error::{Error, Result};
pub use field::{Elem, Field, FieldSpec};
pub use matrix::Matrix;
pub use pid::{PidModule, PresModule};
pub use poly::{Poly, PolyMatrix};
pub use semilinear::TwistedOperator;
