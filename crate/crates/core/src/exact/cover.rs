use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;

use super::linalg::LinearSystem;

/// Largest graph accepted by [`cover_time_rw`].
pub const COVER_DP_MAX_NODES: usize = 16;

/// Exact random-walk expected cover time from `start`.
///
/// Dynamic programme over `(position, visited set)`: the visited set only
/// grows, so sets are processed from large to small and each set needs one
/// `|S| x |S|` solve. Cost is `O(2^m m^3)`; limited to
/// [`COVER_DP_MAX_NODES`] nodes.
pub fn cover_time_rw<S: Scalar>(g: &Graph, start: NodeId) -> Result<S> {
    let m = g.node_count();
    g.check_node(start)?;
    if m > COVER_DP_MAX_NODES {
        return Err(Error::Unsupported(format!(
            "exact cover time limited to {COVER_DP_MAX_NODES} nodes, got {m}"
        )));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let full: usize = (1 << m) - 1;
    let start_bit = 1usize << start.0;
    // value[set * m + v]
    let mut value: Vec<Option<S>> = vec![None; (full + 1) * m];
    for v in 0..m {
        value[full * m + v] = Some(S::zero());
    }
    for set in (1..full).rev() {
        if set & start_bit == 0 {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|v| set & (1 << v) != 0).collect();
        let mut slot = vec![usize::MAX; m];
        for (k, &v) in members.iter().enumerate() {
            slot[v] = k;
        }
        let n = members.len();
        let mut matrix = vec![vec![S::zero(); n]; n];
        let mut rhs = Vec::with_capacity(n);
        for (k, &v) in members.iter().enumerate() {
            let d = g.degree(NodeId(v));
            matrix[k][k] = S::from_usize(d);
            let mut b = S::from_usize(d);
            for arc in g.arcs(NodeId(v)) {
                let w = arc.to.0;
                if set & (1 << w) != 0 {
                    matrix[k][slot[w]] = matrix[k][slot[w]].clone() - S::one();
                } else {
                    let next = set | (1 << w);
                    b = b + value[next * m + w]
                        .clone()
                        .expect("larger sets are solved first");
                }
            }
            rhs.push(b);
        }
        let x = LinearSystem::new(matrix, rhs)?.solve()?;
        for (k, &v) in members.iter().enumerate() {
            value[set * m + v] = Some(x[k].clone());
        }
    }
    if m == 1 {
        return Ok(S::zero());
    }
    Ok(value[start_bit * m + start.0]
        .clone()
        .expect("start set solved"))
}
