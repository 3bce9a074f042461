//! Exploration policies: next-action selectors over a [`Graph`].
//!
//! A [`PolicySpec`] is immutable and shareable; each walk owns a
//! [`PolicyState`] holding whatever memory the policy needs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ActionId, Graph, NodeId};

/// Distribution of the repetition count `z >= 1` of the persistent policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionDist {
    support: Vec<u32>,
    probs: Vec<f64>,
}

impl RepetitionDist {
    pub fn new(support: Vec<u32>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::Parameter(
                "repetition distribution needs matching support and probabilities".into(),
            ));
        }
        if support.contains(&0) {
            return Err(Error::Parameter(
                "repetition counts must be positive".into(),
            ));
        }
        if probs.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(Error::Parameter(
                "repetition probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "repetition probabilities sum to {total}, not 1"
            )));
        }
        Ok(RepetitionDist { support, probs })
    }

    /// `p(z) ∝ 1/z` on `1..=z_max`.
    pub fn harmonic(z_max: u32) -> Self {
        let z_max = z_max.max(1);
        let weights: Vec<f64> = (1..=z_max).map(|z| 1.0 / z as f64).collect();
        let total: f64 = weights.iter().sum();
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        // push rounding residue into the last entry so the sum check is exact
        let drift = 1.0 - probs.iter().sum::<f64>();
        *probs.last_mut().unwrap() += drift;
        RepetitionDist {
            support: (1..=z_max).collect(),
            probs,
        }
    }

    /// `z = 1` with probability `a`, `z = 2` otherwise.
    pub fn one_or_two(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Parameter(format!("probability {a} outside [0, 1]")));
        }
        Self::new(vec![1, 2], vec![a, 1.0 - a])
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (&z, &p) in self.support.iter().zip(&self.probs) {
            acc += p;
            if u < acc {
                return z;
            }
        }
        // u landed in the rounding gap above the last cumulative value
        *self
            .support
            .iter()
            .zip(&self.probs)
            .rev()
            .find(|(_, &p)| p > 0.0)
            .unwrap()
            .0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySpec {
    RandomWalk,
    NegativeFeedback,
    LocalNegativeFeedback { anchor: NodeId },
    TemporallyPersistent(RepetitionDist),
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::RandomWalk => "rw",
            PolicySpec::NegativeFeedback => "nf",
            PolicySpec::LocalNegativeFeedback { .. } => "local-nf",
            PolicySpec::TemporallyPersistent(_) => "persistent",
        }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if let PolicySpec::LocalNegativeFeedback { anchor } = self {
            g.check_node(*anchor)?;
        }
        Ok(())
    }
}

/// Per-(node, action) visit counters, stored flat in arc order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<u64>,
    total: u64,
}

impl CountTable {
    pub fn new(g: &Graph) -> Self {
        CountTable {
            counts: vec![0; g.arc_count()],
            total: 0,
        }
    }

    pub fn get(&self, g: &Graph, i: NodeId, a: ActionId) -> u64 {
        self.counts[g.arc_index(i, a)]
    }

    pub fn increment(&mut self, g: &Graph, i: NodeId, a: ActionId) {
        self.counts[g.arc_index(i, a)] += 1;
        self.total += 1;
    }

    /// Sum of all counters.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn at(&self, g: &Graph, i: NodeId) -> &[u64] {
        &self.counts[g.arc_range(i)]
    }

    /// `max_a N(i, a) - min_a N(i, a)`.
    pub fn spread(&self, g: &Graph, i: NodeId) -> u64 {
        let row = self.at(g, i);
        row.iter().max().unwrap() - row.iter().min().unwrap()
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.total = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pending {
    label: u16,
    remaining: u32,
}

/// Mutable per-walk memory of a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    counts: Option<CountTable>,
    pending: Option<Pending>,
}

/// Outcome of one selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// Take this action at the current node.
    Take(ActionId),
    /// A repeated move whose direction does not exist here: the walker
    /// bumps into a wall and spends one step in place.
    Stay,
}

impl PolicyState {
    pub fn new(spec: &PolicySpec, g: &Graph) -> Self {
        let counts = match spec {
            PolicySpec::NegativeFeedback | PolicySpec::LocalNegativeFeedback { .. } => {
                Some(CountTable::new(g))
            }
            _ => None,
        };
        PolicyState {
            counts,
            pending: None,
        }
    }

    pub fn counts(&self) -> Option<&CountTable> {
        self.counts.as_ref()
    }

    /// Remaining repeats of the pending persistent move (0 when none).
    pub fn pending_repeats(&self) -> u32 {
        self.pending.map_or(0, |p| p.remaining)
    }

    /// Zeroes counts and drops any pending repeat.
    pub fn reset(&mut self) {
        if let Some(c) = self.counts.as_mut() {
            c.clear();
        }
        self.pending = None;
    }
}

/// Actions at `i` whose count equals the minimum count at `i`.
///
/// Without a count table every action qualifies.
pub fn argmin_set(state: &PolicyState, g: &Graph, i: NodeId) -> Vec<ActionId> {
    match &state.counts {
        None => (0..g.degree(i)).map(ActionId).collect(),
        Some(table) => {
            let row = table.at(g, i);
            let min = *row.iter().min().unwrap();
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c == min)
                .map(|(a, _)| ActionId(a))
                .collect()
        }
    }
}

fn favor_least<R: Rng + ?Sized>(
    table: &mut CountTable,
    g: &Graph,
    i: NodeId,
    rng: &mut R,
) -> ActionId {
    let row = table.at(g, i);
    let min = *row.iter().min().unwrap();
    let ties = row.iter().filter(|&&c| c == min).count();
    let pick = rng.random_range(0..ties);
    let a = row
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == min)
        .nth(pick)
        .map(|(a, _)| ActionId(a))
        .unwrap();
    table.increment(g, i, a);
    a
}

fn uniform<R: Rng + ?Sized>(g: &Graph, i: NodeId, rng: &mut R) -> ActionId {
    ActionId(rng.random_range(0..g.degree(i)))
}

/// Selects the next move at node `i` and updates `state`.
pub fn next_action<R: Rng + ?Sized>(
    spec: &PolicySpec,
    state: &mut PolicyState,
    g: &Graph,
    i: NodeId,
    rng: &mut R,
) -> Choice {
    match spec {
        PolicySpec::RandomWalk => Choice::Take(uniform(g, i, rng)),
        PolicySpec::NegativeFeedback => {
            let table = state
                .counts
                .as_mut()
                .expect("favor-least state carries counts");
            Choice::Take(favor_least(table, g, i, rng))
        }
        PolicySpec::LocalNegativeFeedback { anchor } => {
            if i == *anchor {
                let table = state
                    .counts
                    .as_mut()
                    .expect("favor-least state carries counts");
                Choice::Take(favor_least(table, g, i, rng))
            } else {
                Choice::Take(uniform(g, i, rng))
            }
        }
        PolicySpec::TemporallyPersistent(dist) => match state.pending {
            Some(Pending { label, remaining }) if remaining > 0 => {
                state.pending = Some(Pending {
                    label,
                    remaining: remaining - 1,
                });
                g.find_label(i, label).map_or(Choice::Stay, Choice::Take)
            }
            _ => {
                let a = uniform(g, i, rng);
                let z = dist.sample(rng);
                state.pending = Some(Pending {
                    label: g.arcs(i)[a.0].label,
                    remaining: z - 1,
                });
                Choice::Take(a)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{make_clique, make_path, make_star};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn take(c: Choice) -> ActionId {
        match c {
            Choice::Take(a) => a,
            Choice::Stay => panic!("unexpected stay"),
        }
    }

    #[test]
    fn fresh_state_argmin_is_everything() {
        let g = make_star(5).unwrap().graph;
        let st = PolicyState::new(&PolicySpec::NegativeFeedback, &g);
        assert_eq!(argmin_set(&st, &g, NodeId(0)).len(), 5);
    }

    #[test]
    fn argmin_excludes_used_leaf() {
        let g = make_star(4).unwrap().graph;
        let mut st = PolicyState::new(&PolicySpec::NegativeFeedback, &g);
        st.counts
            .as_mut()
            .unwrap()
            .increment(&g, NodeId(0), ActionId(0));
        let set = argmin_set(&st, &g, NodeId(0));
        assert_eq!(set, vec![ActionId(1), ActionId(2), ActionId(3)]);
    }

    #[test]
    fn argmin_tie_on_path() {
        let g = make_path(2).unwrap().graph;
        let mut st = PolicyState::new(&PolicySpec::NegativeFeedback, &g);
        let c = st.counts.as_mut().unwrap();
        c.increment(&g, NodeId(1), ActionId(0));
        c.increment(&g, NodeId(1), ActionId(1));
        assert_eq!(argmin_set(&st, &g, NodeId(1)).len(), 2);
    }

    #[test]
    fn favor_least_cycles_through_leaves() {
        let n = 7;
        let g = make_star(n).unwrap().graph;
        let spec = PolicySpec::NegativeFeedback;
        let mut st = PolicyState::new(&spec, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut hits = vec![0u32; n];
        for _ in 0..2 * n {
            let a = take(next_action(&spec, &mut st, &g, NodeId(0), &mut rng));
            hits[a.0] += 1;
            assert!(st.counts().unwrap().spread(&g, NodeId(0)) <= 1);
        }
        assert!(hits.iter().all(|&h| h == 2));
        assert_eq!(st.counts().unwrap().total(), 2 * n as u64);
    }

    #[test]
    fn random_walk_is_uniform_on_clique() {
        let g = make_clique(4).unwrap().graph;
        let spec = PolicySpec::RandomWalk;
        let mut st = PolicyState::new(&spec, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = [0u32; 3];
        let draws = 30_000;
        for _ in 0..draws {
            hits[take(next_action(&spec, &mut st, &g, NodeId(0), &mut rng)).0] += 1;
        }
        for h in hits {
            assert!((h as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn single_action_nodes_are_forced() {
        let g = make_star(3).unwrap().graph;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for spec in [
            PolicySpec::RandomWalk,
            PolicySpec::NegativeFeedback,
            PolicySpec::LocalNegativeFeedback { anchor: NodeId(0) },
            PolicySpec::TemporallyPersistent(RepetitionDist::one_or_two(0.0).unwrap()),
        ] {
            let mut st = PolicyState::new(&spec, &g);
            assert_eq!(
                next_action(&spec, &mut st, &g, NodeId(2), &mut rng),
                Choice::Take(ActionId(0))
            );
        }
    }

    #[test]
    fn persistent_repeats_direction_and_bumps() {
        let e = crate::env::make_toy_maze();
        let g = &e.graph;
        let spec = PolicySpec::TemporallyPersistent(RepetitionDist::one_or_two(0.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // from node 1 the only move is down to 0; a repeat then continues down to 2
        let mut st = PolicyState::new(&spec, g);
        assert_eq!(
            next_action(&spec, &mut st, g, NodeId(1), &mut rng),
            Choice::Take(ActionId(0))
        );
        assert_eq!(st.pending_repeats(), 1);
        let a = take(next_action(&spec, &mut st, g, NodeId(0), &mut rng));
        assert_eq!(g.successor(NodeId(0), a), NodeId(2));
        assert_eq!(st.pending_repeats(), 0);
        // from 5 down to 4, then down again reaches 6
        let mut st = PolicyState::new(&spec, g);
        next_action(&spec, &mut st, g, NodeId(5), &mut rng);
        let a = take(next_action(&spec, &mut st, g, NodeId(4), &mut rng));
        assert_eq!(g.successor(NodeId(4), a), NodeId(6));
        // from 2 up to 0 is fine; "up" at 1 does not exist
        let mut st = PolicyState::new(&spec, g);
        st.pending = Some(Pending {
            label: crate::env::dir::UP,
            remaining: 1,
        });
        assert_eq!(
            next_action(&spec, &mut st, g, NodeId(1), &mut rng),
            Choice::Stay
        );
    }

    #[test]
    fn reset_restores_fresh_state() {
        let g = make_star(3).unwrap().graph;
        let spec = PolicySpec::NegativeFeedback;
        let fresh = PolicyState::new(&spec, &g);
        let mut st = fresh.clone();
        st.reset();
        assert_eq!(st, fresh);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            next_action(&spec, &mut st, &g, NodeId(0), &mut rng);
        }
        st.reset();
        assert_eq!(st, fresh);
        assert_eq!(argmin_set(&st, &g, NodeId(0)).len(), 3);
    }

    #[test]
    fn repetition_dist_validation() {
        assert!(RepetitionDist::new(vec![1, 2], vec![0.5, 0.4]).is_err());
        assert!(RepetitionDist::new(vec![0], vec![1.0]).is_err());
        assert!(RepetitionDist::one_or_two(1.5).is_err());
        let h = RepetitionDist::harmonic(4);
        assert_eq!(h.support(), &[1, 2, 3, 4]);
        assert!((h.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!((h.probs()[0] / h.probs()[1] - 2.0).abs() < 1e-12);
        let point = RepetitionDist::one_or_two(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!((0..1000).all(|_| point.sample(&mut rng) == 1));
    }
}
