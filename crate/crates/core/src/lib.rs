//! Exact arithmetic for skew polynomial rings `R[x;sigma,delta]` over concrete
//! coefficient rings, together with the structural toolkit built on top of them:
//! Jordan extension towers for injective endomorphisms, decomposition of skew
//! polynomial rings over semisimple coefficients, uniform dimension bookkeeping,
//! leading-coefficient ideal chains, and an explicit infinite-matrix shift ring
//! whose skew polynomial ring has a square-zero left ideal.
//!
//! All arithmetic is exact: prime fields, rational function fields in lowest
//! terms, and integer matrix blocks. No floating point, no truncation without an
//! explicit error.

pub mod jordan;
pub mod linalg;
pub mod ore;
pub mod scalars;
pub mod semisimple;
pub mod shiftring;
pub mod structure;
pub mod verify;

pub use verify::{Check, VerifyReport};
