//! Expected number of excursions from `i` needed to first reach `j`.
//!
//! With `p_k` the probability that an excursion leaving `i` through action
//! `a_k` reaches `j` before returning, the random walk needs `K / sum p_k`
//! excursions on average. The anchored favor-least walk leaves `i` through a
//! uniformly random permutation of its actions every `K` excursions, which
//! gives
//!
//! ```text
//!   (1 + sum_{k=1}^{K-1} S_k) / (1 - prod_j x_j),   x_j = 1 - p_j,
//! ```
//!
//! with `S_k` the normalized elementary symmetric means of `x`.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;

use super::hitting::hitting_prob_before_return;
use super::symmetric::symmetric_means;

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation<S> {
    Finite(S),
    /// `j` cannot be reached within any excursion.
    Infinite,
}

impl<S: Scalar> Expectation<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Expectation::Finite(v) => Some(v),
            Expectation::Infinite => None,
        }
    }

    pub fn to_real(&self) -> f64 {
        match self {
            Expectation::Finite(v) => v.to_real(),
            Expectation::Infinite => f64::INFINITY,
        }
    }
}

fn check_probs<S: Scalar>(p: &[S]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Parameter("need at least one probability".into()));
    }
    if p.iter().any(|v| *v < S::zero() || *v > S::one()) {
        return Err(Error::Parameter("probabilities must lie in [0, 1]".into()));
    }
    Ok(())
}

/// `K / sum_k p_k` for the random walk.
pub fn expected_excursions_rw<S: Scalar>(p: &[S]) -> Result<Expectation<S>> {
    check_probs(p)?;
    let total = p.iter().fold(S::zero(), |acc, v| acc + v.clone());
    if total.is_zero() {
        return Ok(Expectation::Infinite);
    }
    Ok(Expectation::Finite(S::from_usize(p.len()) / total))
}

/// Closed form for the walk that applies favor-least only at `i`.
pub fn expected_excursions_local_nf<S: Scalar>(p: &[S]) -> Result<Expectation<S>> {
    check_probs(p)?;
    let x: Vec<S> = p.iter().map(|v| S::one() - v.clone()).collect();
    let k = x.len();
    let sm = symmetric_means(&x);
    // S_K = prod x_j because C(K, K) = 1
    let denominator = S::one() - sm.mean(k);
    if denominator <= S::zero() {
        return Ok(Expectation::Infinite);
    }
    let numerator = (1..k).fold(S::one(), |acc, j| acc + sm.mean(j));
    Ok(Expectation::Finite(numerator / denominator))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalImprovement<S> {
    pub p: Vec<S>,
    pub e_rw: Expectation<S>,
    pub e_loc: Expectation<S>,
    /// `e_loc <= e_rw + 1e-9`.
    pub holds: bool,
    /// Both expectations infinite; `holds` is then vacuous.
    pub vacuous: bool,
}

/// Compares both excursion expectations for the pair `(i, j)`.
pub fn local_improvement_check<S: Scalar>(
    g: &Graph,
    i: NodeId,
    j: NodeId,
) -> Result<LocalImprovement<S>> {
    let p = hitting_prob_before_return::<S>(g, i, j)?;
    let e_rw = expected_excursions_rw(&p)?;
    let e_loc = expected_excursions_local_nf(&p)?;
    let slack = S::ratio(1, 1_000_000_000);
    let (holds, vacuous) = match (&e_rw, &e_loc) {
        (Expectation::Infinite, Expectation::Infinite) => (true, true),
        (Expectation::Infinite, Expectation::Finite(_)) => (true, false),
        (Expectation::Finite(_), Expectation::Infinite) => (false, false),
        (Expectation::Finite(rw), Expectation::Finite(loc)) => {
            (loc.clone() <= rw.clone() + slack, false)
        }
    };
    Ok(LocalImprovement {
        p,
        e_rw,
        e_loc,
        holds,
        vacuous,
    })
}
