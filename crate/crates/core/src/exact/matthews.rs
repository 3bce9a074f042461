use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{harmonic, Scalar};

use super::hitting::all_pairs_hitting_times;

/// Harmonic sandwich `mu_minus H_{m-1} <= E[T_C] <= mu_plus H_{m-1}` for
/// the random walk, from any start node.
#[derive(Debug, Clone, PartialEq)]
pub struct MatthewsBounds<S> {
    /// `min_{i != j} E[T_j | X_0 = i]`.
    pub mu_minus: S,
    /// `max_{i != j} E[T_j | X_0 = i]`.
    pub mu_plus: S,
    pub lower: S,
    pub upper: S,
}

pub fn matthews_bounds<S: Scalar>(g: &Graph) -> Result<MatthewsBounds<S>> {
    let m = g.node_count();
    if m < 2 {
        return Err(Error::Unsupported(
            "cover bounds need at least two nodes".into(),
        ));
    }
    let h = all_pairs_hitting_times::<S>(g)?;
    let mut off_diag = h.iter().enumerate().flat_map(|(i, row)| {
        row.iter()
            .enumerate()
            .filter(move |(j, _)| *j != i)
            .map(|(_, v)| v.clone())
    });
    let first = off_diag.next().unwrap();
    let (mu_minus, mu_plus) = off_diag.fold((first.clone(), first), |(lo, hi), v| {
        (
            if v < lo { v.clone() } else { lo },
            if v > hi { v } else { hi },
        )
    });
    let hm: S = harmonic(m - 1);
    Ok(MatthewsBounds {
        lower: mu_minus.clone() * hm.clone(),
        upper: mu_plus.clone() * hm,
        mu_minus,
        mu_plus,
    })
}
