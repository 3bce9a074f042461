use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::env::make_toy_maze;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::scalar::Scalar;

/// Expected time to reach cell 6 from cell 0 of the toy maze under the
/// persistent policy that repeats its action once with probability `a` and
/// twice with probability `1 - a`. Returns `None` for `a = 0`, where the
/// walker bounces between cells 1 and 2 forever.
pub fn persistent_toy_t0<S: Scalar>(a: S) -> Result<Option<S>> {
    if a < S::zero() || a > S::one() {
        return Err(Error::Parameter("a must lie in [0, 1]".into()));
    }
    if a.is_zero() {
        return Ok(None);
    }
    let r = |n: i64, d: i64| S::ratio(n, d);
    let one = S::one();
    let b = one.clone() - a.clone();
    let step = a.clone() + r(2, 1) * b.clone();
    let three_one_minus_b = r(3, 1) * (one.clone() - b.clone());
    let three_two_minus_a = r(3, 1) * (r(2, 1) - a.clone());
    let a2 = a.clone() * a.clone();
    let ab = a.clone() * b.clone();

    let inner_num = r(3, 1) * a.clone() - r(2, 3) * a2.clone()
        + r(2, 3) * ab.clone()
        + r(2, 1) * b.clone()
        + r(1, 3);
    let numerator = r(2, 1) * step.clone() / three_one_minus_b.clone()
        + step.clone() * inner_num / three_two_minus_a.clone()
        + step;
    let inner_den = a.clone() - a2 / r(3, 1) + r(2, 3) * ab + r(2, 3) * b.clone() * b;
    let denominator = one - r(2, 1) * a / three_one_minus_b - inner_den / three_two_minus_a;
    if denominator <= S::zero() {
        return Err(Error::Numerical(
            "non-positive denominator in toy-maze formula".into(),
        ));
    }
    Ok(Some(numerator / denominator))
}

/// One trajectory with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPath {
    pub nodes: Vec<NodeId>,
    pub prob: BigRational,
}

impl WeightedPath {
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }
}

const ENUMERATION_DEPTH: usize = 256;

/// Enumerates every favor-least trajectory from `start` until `target`,
/// branching on each tie with equal probability. Only arcs into nodes with
/// `allowed[v]` set are available.
pub fn enumerate_favor_least_paths(
    g: &Graph,
    start: NodeId,
    target: NodeId,
    allowed: &[bool],
) -> Result<Vec<WeightedPath>> {
    g.check_node(start)?;
    g.check_node(target)?;
    if allowed.len() != g.node_count() || !allowed[start.0] || !allowed[target.0] {
        return Err(Error::Parameter(
            "allowed mask must cover the graph and include start and target".into(),
        ));
    }
    let arcs: Vec<Vec<NodeId>> = g
        .nodes()
        .map(|v| {
            g.arcs(v)
                .iter()
                .map(|a| a.to)
                .filter(|w| allowed[w.0])
                .collect()
        })
        .collect();
    if arcs
        .iter()
        .enumerate()
        .any(|(v, list)| allowed[v] && list.is_empty())
    {
        return Err(Error::InvalidGraph(
            "restricted graph has a dead end".into(),
        ));
    }
    let mut counts: Vec<Vec<u64>> = arcs.iter().map(|l| vec![0; l.len()]).collect();
    let mut path = vec![start];
    let mut out = Vec::new();
    let one = BigRational::one();
    explore(&arcs, target, &mut counts, &mut path, &one, &mut out)?;
    Ok(out)
}

fn explore(
    arcs: &[Vec<NodeId>],
    target: NodeId,
    counts: &mut [Vec<u64>],
    path: &mut Vec<NodeId>,
    prob: &BigRational,
    out: &mut Vec<WeightedPath>,
) -> Result<()> {
    let here = *path.last().unwrap();
    if here == target && path.len() > 1 {
        out.push(WeightedPath {
            nodes: path.clone(),
            prob: prob.clone(),
        });
        return Ok(());
    }
    if path.len() > ENUMERATION_DEPTH {
        return Err(Error::Numerical(
            "favor-least enumeration exceeded depth limit".into(),
        ));
    }
    let row = &counts[here.0];
    let least = *row.iter().min().unwrap();
    let ties: Vec<usize> = (0..row.len()).filter(|&k| row[k] == least).collect();
    let branch = prob / BigRational::from_integer(BigInt::from(ties.len()));
    for k in ties {
        counts[here.0][k] += 1;
        path.push(arcs[here.0][k]);
        explore(arcs, target, counts, path, &branch, out)?;
        path.pop();
        counts[here.0][k] -= 1;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedMaze {
    pub paths: Vec<WeightedPath>,
    pub expectation: BigRational,
}

/// Favor-least trajectories on the toy maze with cells 1 and 2 blocked,
/// from 0 until 6, and their expected length.
pub fn enumerate_restricted_maze() -> RestrictedMaze {
    let env = make_toy_maze();
    let mut allowed = vec![true; env.graph.node_count()];
    allowed[1] = false;
    allowed[2] = false;
    let paths = enumerate_favor_least_paths(&env.graph, NodeId(0), NodeId(6), &allowed)
        .expect("restricted maze enumeration is finite");
    let expectation = paths.iter().fold(BigRational::zero(), |acc, p| {
        acc + &p.prob * BigRational::from_integer(BigInt::from(p.steps()))
    });
    RestrictedMaze { paths, expectation }
}
