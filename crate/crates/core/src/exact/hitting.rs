use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;

use super::linalg::LinearSystem;

fn connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Solves `d_v u_v - sum_{v->w, w free} u_w = rhs(v)` over the free nodes and
/// returns `u` on all nodes, with `fixed` values at the pinned ones.
fn first_step_solve<S: Scalar>(
    g: &Graph,
    fixed: &[Option<S>],
    rhs: impl Fn(NodeId) -> S,
) -> Result<Vec<S>> {
    let free: Vec<NodeId> = g.nodes().filter(|v| fixed[v.0].is_none()).collect();
    let mut slot = vec![usize::MAX; g.node_count()];
    for (k, v) in free.iter().enumerate() {
        slot[v.0] = k;
    }
    let n = free.len();
    let mut matrix = vec![vec![S::zero(); n]; n];
    let mut b = Vec::with_capacity(n);
    for (k, &v) in free.iter().enumerate() {
        matrix[k][k] = S::from_usize(g.degree(v));
        let mut rhs_v = rhs(v);
        for arc in g.arcs(v) {
            match &fixed[arc.to.0] {
                Some(val) => rhs_v = rhs_v + val.clone(),
                None => {
                    let col = slot[arc.to.0];
                    matrix[k][col] = matrix[k][col].clone() - S::one();
                }
            }
        }
        b.push(rhs_v);
    }
    let x = LinearSystem::new(matrix, b)?.solve()?;
    let mut out: Vec<S> = fixed
        .iter()
        .map(|f| f.clone().unwrap_or_else(S::zero))
        .collect();
    for (k, v) in free.iter().enumerate() {
        out[v.0] = x[k].clone();
    }
    Ok(out)
}

/// Random-walk expected hitting times `E[T_target | X_0 = v]` for every `v`,
/// with `h[target] = 0`.
pub fn hitting_times_rw<S: Scalar>(g: &Graph, target: NodeId) -> Result<Vec<S>> {
    connected(g)?;
    g.check_node(target)?;
    let mut fixed = vec![None; g.node_count()];
    fixed[target.0] = Some(S::zero());
    // d_v h_v - sum h_w = d_v
    first_step_solve(g, &fixed, |v| S::from_usize(g.degree(v)))
}

/// `h[i][j] = E[T_j | X_0 = i]` for all pairs, `h[i][i] = 0`.
pub fn all_pairs_hitting_times<S: Scalar>(g: &Graph) -> Result<Vec<Vec<S>>> {
    let m = g.node_count();
    let mut table = vec![vec![S::zero(); m]; m];
    for j in g.nodes() {
        let h = hitting_times_rw::<S>(g, j)?;
        for (i, hi) in h.into_iter().enumerate() {
            table[i][j.0] = hi;
        }
    }
    Ok(table)
}

/// For each action `a_k` at `i`: the random-walk probability, starting from
/// the successor of `a_k`, of reaching `j` before returning to `i`.
pub fn hitting_prob_before_return<S: Scalar>(g: &Graph, i: NodeId, j: NodeId) -> Result<Vec<S>> {
    connected(g)?;
    g.check_node(i)?;
    g.check_node(j)?;
    if i == j {
        return Err(Error::Parameter("i and j must differ".into()));
    }
    let mut fixed = vec![None; g.node_count()];
    fixed[i.0] = Some(S::zero());
    fixed[j.0] = Some(S::one());
    let u = first_step_solve(g, &fixed, |_| S::zero())?;
    Ok(g.arcs(i).iter().map(|arc| u[arc.to.0].clone()).collect())
}
