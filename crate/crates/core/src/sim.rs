//! Seeded walks and Monte Carlo replication.
//!
//! Time is the step index: `X_0` is the start node and counts as a visit;
//! the cover time is the first `n` with `{X_0, ..., X_n}` equal to the whole
//! node set. Every step counts, including self-loop moves and wall bumps.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{EnvKind, EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::policy::{next_action, Choice, PolicySpec, PolicyState};
use crate::seed::run_rng;

/// Cap used when the worst-case favor-least bound is unknown or small.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    Cover,
    Hit(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOptions {
    pub step_cap: u64,
    pub stop: StopRule,
    /// Node whose first hitting time is recorded in [`WalkRecord::t_hit`].
    pub target: Option<NodeId>,
    pub record_trajectory: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkRecord {
    pub start: NodeId,
    /// Steps actually taken.
    pub steps: u64,
    pub t_cover: Option<u64>,
    /// First `n >= 1` with `X_n = target`.
    pub t_hit: Option<u64>,
    pub cap_hit: bool,
    /// Visits per node over `X_0..=X_steps`.
    pub visits: Vec<u64>,
    pub trajectory: Option<Vec<NodeId>>,
    /// Largest per-node count spread seen by a favor-least policy (0 otherwise).
    pub max_spread: u64,
}

/// Runs one walk. The graph is assumed connected.
pub fn run_walk<R: Rng + ?Sized>(
    g: &Graph,
    spec: &PolicySpec,
    start: NodeId,
    rng: &mut R,
    opts: WalkOptions,
) -> WalkRecord {
    let m = g.node_count();
    let mut state = PolicyState::new(spec, g);
    let mut visits = vec![0u64; m];
    let mut seen = vec![false; m];
    let mut unseen = m - 1;
    let mut trajectory = opts.record_trajectory.then(|| vec![start]);
    visits[start.0] = 1;
    seen[start.0] = true;

    let mut t_cover = (unseen == 0).then_some(0);
    let mut t_hit = None;
    let mut max_spread = 0;
    let mut pos = start;
    let mut steps = 0;

    let done = |t_cover: Option<u64>, t_hit: Option<u64>| match opts.stop {
        StopRule::Cover => t_cover.is_some(),
        StopRule::Hit(_) => t_hit.is_some(),
    };
    let hit_target = match opts.stop {
        StopRule::Hit(t) => Some(t),
        StopRule::Cover => opts.target,
    };

    while !done(t_cover, t_hit) && steps < opts.step_cap {
        let from = pos;
        pos = match next_action(spec, &mut state, g, from, rng) {
            Choice::Take(a) => g.successor(from, a),
            Choice::Stay => from,
        };
        steps += 1;
        if let Some(counts) = state.counts() {
            max_spread = max_spread.max(counts.spread(g, from));
        }
        visits[pos.0] += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push(pos);
        }
        if !seen[pos.0] {
            seen[pos.0] = true;
            unseen -= 1;
            if unseen == 0 {
                t_cover = Some(steps);
            }
        }
        if t_hit.is_none() && hit_target == Some(pos) {
            t_hit = Some(steps);
        }
    }

    WalkRecord {
        start,
        steps,
        t_cover,
        t_hit,
        cap_hit: !done(t_cover, t_hit),
        visits,
        trajectory,
        max_spread,
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Walks from `start` until every node has been visited or `step_cap` steps.
pub fn run_cover<R: Rng + ?Sized>(
    g: &Graph,
    spec: &PolicySpec,
    start: NodeId,
    rng: &mut R,
    step_cap: u64,
) -> Result<WalkRecord> {
    require_connected(g)?;
    g.check_node(start)?;
    spec.validate(g)?;
    if step_cap == 0 {
        return Err(Error::Parameter("step cap must be positive".into()));
    }
    let opts = WalkOptions {
        step_cap,
        stop: StopRule::Cover,
        target: None,
        record_trajectory: false,
    };
    Ok(run_walk(g, spec, start, rng, opts))
}

/// Walks from `start` until `target` is first reached or `step_cap` steps.
pub fn run_hitting<R: Rng + ?Sized>(
    g: &Graph,
    spec: &PolicySpec,
    start: NodeId,
    target: NodeId,
    rng: &mut R,
    step_cap: u64,
) -> Result<WalkRecord> {
    require_connected(g)?;
    g.check_node(start)?;
    g.check_node(target)?;
    spec.validate(g)?;
    if start == target {
        return Err(Error::Parameter(
            "hitting target must differ from start".into(),
        ));
    }
    if step_cap == 0 {
        return Err(Error::Parameter("step cap must be positive".into()));
    }
    let opts = WalkOptions {
        step_cap,
        stop: StopRule::Hit(target),
        target: Some(target),
        record_trajectory: false,
    };
    Ok(run_walk(g, spec, start, rng, opts))
}

/// Excursion index `N_j` of the first visit to each node.
///
/// Excursion `k` covers times `V_{k-1}+1 ..= V_k`, where `V_k` is the `k`-th
/// return to `start`. Entries for `start` and for unreached nodes are `None`.
pub fn count_excursions(
    trajectory: &[NodeId],
    start: NodeId,
    node_count: usize,
) -> Vec<Option<u64>> {
    let mut first = vec![None; node_count];
    let mut excursion = 1u64;
    for &x in trajectory.iter().skip(1) {
        if x == start {
            excursion += 1;
        } else if first[x.0].is_none() {
            first[x.0] = Some(excursion);
        }
    }
    first
}

/// Worst-case favor-least cover bound `1 + (m - 1) * d_max^diam`.
///
/// `None` when the graph is disconnected or the value overflows `u64`.
pub fn general_bound(g: &Graph) -> Option<u64> {
    let diam = g.eccentricity_max().ok()?;
    let pow = (g.max_degree() as u64).checked_pow(u32::try_from(diam).ok()?)?;
    (g.node_count() as u64 - 1).checked_mul(pow)?.checked_add(1)
}

/// `max(10^7, 2 G)` when `G` fits in `u64`, else `10^7`.
pub fn default_step_cap(g: &Graph) -> u64 {
    general_bound(g)
        .and_then(|b| b.checked_mul(2))
        .map_or(DEFAULT_STEP_CAP, |b| b.max(DEFAULT_STEP_CAP))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundStatus {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub observed: Option<u64>,
    pub bound: Option<f64>,
    #[serde(flatten)]
    pub status: BoundStatus,
}

impl BoundCheck {
    fn compare(name: &str, observed: u64, bound: f64, holds: bool) -> Self {
        BoundCheck {
            name: name.into(),
            observed: Some(observed),
            bound: Some(bound),
            status: if holds {
                BoundStatus::Pass
            } else {
                BoundStatus::Fail
            },
        }
    }

    fn skipped(name: &str, reason: impl Into<String>) -> Self {
        BoundCheck {
            name: name.into(),
            observed: None,
            bound: None,
            status: BoundStatus::Skipped {
                reason: reason.into(),
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == BoundStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == BoundStatus::Fail
    }
}

/// Per-run worst-case bounds for a favor-least walk with a recorded trajectory.
///
/// * `general`: `T_C <= 1 + (m-1) d_max^diam` on every graph;
/// * `tree-visits`: each node visited at most `2(b+1)H` times up to `T_C`;
/// * `tree-cover`: `T_C <= 4H (b+1)/(b-1) b^H`;
/// * `path-returns`: node 0 revisited at most `n-1` times before node `n`
///   is first reached.
pub fn check_bounds(record: &WalkRecord, g: &Graph, env: &EnvSpec) -> Vec<BoundCheck> {
    let mut out = Vec::new();
    let Some(traj) = record.trajectory.as_deref() else {
        out.push(BoundCheck::skipped("all", "trajectory not recorded"));
        return out;
    };

    match (record.t_cover, general_bound(g)) {
        (None, _) => out.push(BoundCheck::skipped(
            "general",
            "walk did not cover the graph",
        )),
        (_, None) => out.push(BoundCheck::skipped("general", "bound overflows u64")),
        (Some(t), Some(b)) => out.push(BoundCheck::compare("general", t, b as f64, t <= b)),
    }

    match env.kind {
        EnvKind::Btree { b, h } => {
            let per_node = 2 * (b as u64 + 1) * h as u64;
            match record.t_cover {
                None => {
                    out.push(BoundCheck::skipped(
                        "tree-visits",
                        "walk did not cover the graph",
                    ));
                    out.push(BoundCheck::skipped(
                        "tree-cover",
                        "walk did not cover the graph",
                    ));
                }
                Some(t) => {
                    let mut visits = vec![0u64; g.node_count()];
                    for x in &traj[..=t as usize] {
                        visits[x.0] += 1;
                    }
                    let worst = visits.iter().copied().max().unwrap_or(0);
                    out.push(BoundCheck::compare(
                        "tree-visits",
                        worst,
                        per_node as f64,
                        worst <= per_node,
                    ));
                    // T_C (b-1) <= 4 H (b+1) b^H, in integers
                    let rhs = (b as u64)
                        .checked_pow(h as u32)
                        .and_then(|p| p.checked_mul(4 * h as u64 * (b as u64 + 1)));
                    match rhs {
                        Some(rhs) => {
                            let bound = rhs as f64 / (b as f64 - 1.0);
                            out.push(BoundCheck::compare(
                                "tree-cover",
                                t,
                                bound,
                                t * (b as u64 - 1) <= rhs,
                            ));
                        }
                        None => out.push(BoundCheck::skipped("tree-cover", "bound overflows u64")),
                    }
                }
            }
        }
        EnvKind::Path { n } => match traj.iter().position(|x| x.0 == n) {
            None => out.push(BoundCheck::skipped("path-returns", "node n never reached")),
            Some(t_n) => {
                let returns = traj[1..t_n].iter().filter(|x| x.0 == 0).count() as u64;
                let bound = n as u64 - 1;
                out.push(BoundCheck::compare(
                    "path-returns",
                    returns,
                    bound as f64,
                    returns <= bound,
                ));
            }
        },
        _ => {}
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Cover time `T_C`.
    Cover,
    /// First hitting time of the environment's target.
    Hit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub env: EnvKind,
    pub policy: PolicySpec,
    pub measure: Measure,
    pub n_runs: u64,
    pub seed_base: u64,
    /// `None` selects [`default_step_cap`].
    pub step_cap: Option<u64>,
    pub record_trajectory: bool,
    pub bound_checks: bool,
    /// Worker threads; 0 lets rayon decide. Output does not depend on it.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(env: EnvKind, policy: PolicySpec, n_runs: u64, seed_base: u64) -> Self {
        SimConfig {
            env,
            policy,
            measure: Measure::Cover,
            n_runs,
            seed_base,
            step_cap: None,
            record_trajectory: false,
            bound_checks: false,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub n_runs: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub seed_base: u64,
    pub cap_hits: u64,
}

impl McStats {
    /// Statistics over the `Some` values; `None` entries count as cap hits.
    pub fn from_values(values: &[Option<f64>], seed_base: u64) -> Self {
        let valid: Vec<f64> = values.iter().flatten().copied().collect();
        let n = valid.len();
        let mean = if n == 0 {
            f64::NAN
        } else {
            valid.iter().sum::<f64>() / n as f64
        };
        let variance = if n < 2 {
            0.0
        } else {
            valid.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        };
        McStats {
            n_runs: values.len() as u64,
            mean,
            variance,
            stderr: if n == 0 {
                f64::NAN
            } else {
                (variance / n as f64).sqrt()
            },
            seed_base,
            cap_hits: (values.len() - n) as u64,
        }
    }

    /// `(self.mean - other.mean) / sqrt(se1^2 + se2^2)`.
    pub fn z_versus(&self, other: &McStats) -> f64 {
        let se = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        let diff = self.mean - other.mean;
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            }
        } else {
            diff / se
        }
    }

    /// `(reference - mean) / stderr`: positive when the mean lies below `reference`.
    pub fn z_below(&self, reference: f64) -> f64 {
        (reference - self.mean) / self.stderr
    }

    /// Whether `reference` lies within `k` standard errors of the mean.
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.mean - reference).abs() <= k * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_id: u64,
    pub record: WalkRecord,
    pub bounds: Vec<BoundCheck>,
}

impl RunResult {
    pub fn value(&self, measure: Measure) -> Option<u64> {
        if self.record.cap_hit {
            return None;
        }
        match measure {
            Measure::Cover => self.record.t_cover,
            Measure::Hit => self.record.t_hit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOutcome {
    pub stats: McStats,
    pub runs: Vec<RunResult>,
}

/// Runs `f(run_id, rng)` for `run_id in 0..n_runs`, each with its own derived
/// RNG, on `workers` threads (0 = rayon default). Results are in run order.
pub fn replicate<T, F>(n_runs: u64, seed_base: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut rand_chacha::ChaCha8Rng) -> T + Sync,
{
    let job = || {
        (0..n_runs)
            .into_par_iter()
            .map(|r| f(r, &mut run_rng(seed_base, r)))
            .collect::<Vec<T>>()
    };
    if workers == 0 {
        Ok(job())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
        Ok(pool.install(job))
    }
}

/// Builds the environment and runs the configured replications.
pub fn monte_carlo(config: &SimConfig) -> Result<McOutcome> {
    let env = config.env.build()?;
    monte_carlo_on(&env, config)
}

/// [`monte_carlo`] on an already-built environment.
pub fn monte_carlo_on(env: &Environment, config: &SimConfig) -> Result<McOutcome> {
    if config.n_runs == 0 {
        return Err(Error::Parameter("n_runs must be at least 1".into()));
    }
    let g = &env.graph;
    config.policy.validate(g)?;
    let step_cap = config.step_cap.unwrap_or_else(|| default_step_cap(g));
    if step_cap == 0 {
        return Err(Error::Parameter("step cap must be positive".into()));
    }
    let stop = match config.measure {
        Measure::Cover => StopRule::Cover,
        Measure::Hit => StopRule::Hit(env.spec.target.ok_or_else(|| {
            Error::Unsupported(format!("{} has no target node", env.spec.kind.name()))
        })?),
    };
    let record_trajectory = config.record_trajectory || config.bound_checks;
    let runs = replicate(
        config.n_runs,
        config.seed_base,
        config.workers,
        |run_id, rng| {
            let start = env.start_node(rng);
            let opts = WalkOptions {
                step_cap,
                stop,
                target: env.spec.target,
                record_trajectory,
            };
            let mut record = run_walk(g, &config.policy, start, rng, opts);
            let bounds = if config.bound_checks {
                check_bounds(&record, g, &env.spec)
            } else {
                Vec::new()
            };
            if !config.record_trajectory {
                record.trajectory = None;
            }
            RunResult {
                run_id,
                record,
                bounds,
            }
        },
    )?;
    let values: Vec<Option<f64>> = runs
        .iter()
        .map(|r| r.value(config.measure).map(|v| v as f64))
        .collect();
    Ok(McOutcome {
        stats: McStats::from_values(&values, config.seed_base),
        runs,
    })
}
