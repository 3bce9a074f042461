//! Cover-time laboratory for graph exploration policies.
//!
//! The crate compares the plain random walk against the favor-least
//! ("negative feedback") walk, which at every node moves along one of the
//! actions it has taken least often so far. It provides:
//!
//! * [`graph`]: an immutable action-labelled graph and structural queries,
//! * [`env`]: generators for the benchmark graph families,
//! * [`policy`]: random-walk, favor-least, anchored favor-least and
//!   temporally-persistent action selectors,
//! * [`sim`]: seeded single walks and parallel, reproducible Monte Carlo,
//! * [`exact`]: linear-algebra and enumeration oracles for hitting times,
//!   excursion counts, harmonic cover bounds and per-family closed forms,
//! * [`continuous`]: Brownian / Lévy walkers on a square with a kernel-count
//!   favor-least policy.
//!
//! The exact routines are generic over [`Scalar`]; [`Real`] and [`Exact`]
//! name the two instantiations used throughout.

pub mod continuous;
pub mod env;
pub mod error;
pub mod exact;
pub mod graph;
pub mod policy;
pub mod scalar;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{ActionId, Graph, NodeId};
pub use scalar::Scalar;

/// Floating-point scalar used for simulation statistics and float-valued analysis.
pub type Real = f64;

/// Exact rational scalar for oracle computations.
pub type Exact = num_rational::BigRational;

/// Per-node expected hitting times in floating point.
pub type HittingTimes = Vec<Real>;

/// Symmetric means evaluated in floating point.
pub type RealSymmetricMeans = exact::SymmetricMeans<Real>;

/// Symmetric means evaluated in exact rationals.
pub type ExactSymmetricMeans = exact::SymmetricMeans<Exact>;
