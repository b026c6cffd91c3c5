//! Distribution-free testers for low-degree multivariate polynomials over ℝⁿ.
//!
//! The library provides four tester families — exact, noise-tolerant
//! (approximate), lattice-discrete, and additivity — together with the
//! numerical primitives they rest on: exact rational multivariate polynomial
//! arithmetic, finite forward differences, Chebyshev interpolation machinery,
//! continuous and discrete Gaussian samplers, and an empirical check suite for
//! the structural lemmas the testers' correctness depends on.
//!
//! All testers see the function under test only through [`oracle::FunctionOracle`],
//! which enforces function semantics (identical queries return identical
//! values) and counts queries tamper-proof. Randomness is always supplied by
//! an explicit seeded RNG, so every run replays deterministically.

pub mod additivity;
pub mod approx;
pub mod chebyshev;
pub mod checks;
pub mod compare;
pub mod difference;
pub mod discrete;
pub mod error;
pub mod exact;
pub mod harness;
pub mod logmag;
pub mod oracle;
pub mod poly;
pub mod sampling;
pub mod stats;
pub mod verdict;

pub use compare::Comparison;
pub use error::Error;
pub use oracle::FunctionOracle;
pub use poly::{MultiPoly, Rat, UniPoly};
pub use verdict::{Decision, Verdict};

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
