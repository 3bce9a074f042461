//! Exact (non-simulation) evaluation of hitting times, excursion counts,
//! harmonic cover bounds, family closed forms and the toy-maze results.
//!
//! Linear-algebra routines are generic over [`Scalar`](crate::Scalar): run
//! them in `f64` for speed or in [`Exact`](crate::Exact) rationals when the
//! answer must be checked to the last digit.

mod closed_form;
mod cover;
mod excursions;
mod hitting;
mod linalg;
mod matthews;
mod symmetric;
mod toy;

pub use closed_form::{closed_form, ClosedForm, FormKind, PolicyKind};
pub use cover::{cover_time_rw, COVER_DP_MAX_NODES};
pub use excursions::{
    expected_excursions_local_nf, expected_excursions_rw, local_improvement_check, Expectation,
    LocalImprovement,
};
pub use hitting::{all_pairs_hitting_times, hitting_prob_before_return, hitting_times_rw};
pub use linalg::LinearSystem;
pub use matthews::{matthews_bounds, MatthewsBounds};
pub use symmetric::{symmetric_means, SymmetricMeans};
pub use toy::{
    enumerate_favor_least_paths, enumerate_restricted_maze, persistent_toy_t0, RestrictedMaze,
    WeightedPath,
};
