//! Random positive definite functions on groups: finitary permutations,
//! Thoma characters, the sign-cocycle construction over `S_∞`, Gram matrix
//! checks, linear examples, fixed-point algebras of finite actions, and a
//! deterministic Monte Carlo harness.

pub mod error;
pub mod fixalg;
pub mod group;
pub mod icc;
pub mod linalg;
pub mod linear_examples;
pub mod mc;
pub mod pd;
pub mod perm;
pub mod rep;
pub mod rng;
pub mod thoma;
pub mod vk;

pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupElement, TableElement};
pub use mc::{compare, estimate, estimate_with_workers, MCEstimate, Sampler, Verdict};
pub use pd::{gns_vectors, gram, psd_check, GramReport, PdFunction, DEFAULT_TOLERANCE};
pub use perm::{FinitaryPermutation, Sign};
pub use rep::{FiniteRepresentation, UnitaryMatrix, UnitaryRepresentation};
pub use thoma::ThomaParams;
pub use vk::{sample_config, Configuration, Label};
