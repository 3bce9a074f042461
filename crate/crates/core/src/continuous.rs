//! Walkers on the square `[0, D]²` measured by when they have entered every
//! cell of an `M x M` partition.
//!
//! The policy chooses one of four axis directions; the step length always
//! comes from the motion model. Coordinates are clipped at the walls.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Pareto, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{replicate, McStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PosX,
    NegX,
    PosY,
    NegY,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::PosX,
        Direction::NegX,
        Direction::PosY,
        Direction::NegY,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    fn unit(self) -> (f64, f64) {
        match self {
            Direction::PosX => (1.0, 0.0),
            Direction::NegX => (-1.0, 0.0),
            Direction::PosY => (0.0, 1.0),
            Direction::NegY => (0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Motion {
    /// Length `|N(0, 1)|`.
    Brownian,
    /// Length from a Pareto law with scale 1 and shape 2.
    Levy,
}

impl Motion {
    pub fn sample_length<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Motion::Brownian => {
                let z: f64 = StandardNormal.sample(rng);
                z.abs()
            }
            Motion::Levy => Pareto::new(1.0, 2.0)
                .expect("valid Pareto parameters")
                .sample(rng),
        }
    }
}

/// Moves `s` by a sampled length along `dir` and clips to `[0, side]²`.
pub fn step<R: Rng + ?Sized>(
    motion: Motion,
    dir: Direction,
    s: Point,
    side: f64,
    rng: &mut R,
) -> Point {
    let len = motion.sample_length(rng);
    let (ux, uy) = dir.unit();
    Point::new(
        (s.x + ux * len).clamp(0.0, side),
        (s.y + uy * len).clamp(0.0, side),
    )
}

/// `κ(s1, s2) = 1{|dx| <= δ and |dy| <= δ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorKernel {
    pub delta: f64,
}

impl IndicatorKernel {
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::Parameter("kernel delta must be non-negative".into()));
        }
        Ok(IndicatorKernel { delta })
    }

    pub fn eval(&self, a: Point, b: Point) -> bool {
        (a.x - b.x).abs() <= self.delta && (a.y - b.y).abs() <= self.delta
    }
}

/// Past `(state, direction)` pairs with a grid index of width `δ`.
#[derive(Debug, Clone)]
pub struct History {
    kernel: IndicatorKernel,
    entries: Vec<(Point, Direction)>,
    buckets: Option<HashMap<(i64, i64), Vec<usize>>>,
}

impl History {
    pub fn new(kernel: IndicatorKernel) -> Self {
        let indexed = kernel.delta > 0.0 && kernel.delta.is_finite();
        History {
            kernel,
            entries: Vec::new(),
            buckets: indexed.then(HashMap::new),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kernel(&self) -> IndicatorKernel {
        self.kernel
    }

    fn bucket(&self, v: f64) -> i64 {
        (v / self.kernel.delta).floor() as i64
    }

    pub fn push(&mut self, s: Point, a: Direction) {
        let key = self
            .buckets
            .as_ref()
            .map(|_| (self.bucket(s.x), self.bucket(s.y)));
        if let (Some(buckets), Some(key)) = (self.buckets.as_mut(), key) {
            buckets.entry(key).or_default().push(self.entries.len());
        }
        self.entries.push((s, a));
    }

    /// `n_approx(s, a)` for all four directions, indexed by [`Direction::index`].
    pub fn counts_at(&self, s: Point) -> [u64; 4] {
        let mut out = [0u64; 4];
        match &self.buckets {
            None => {
                for (p, a) in &self.entries {
                    if self.kernel.eval(*p, s) {
                        out[a.index()] += 1;
                    }
                }
            }
            Some(buckets) => {
                let d = self.kernel.delta;
                let (x0, x1) = (self.bucket(s.x - d), self.bucket(s.x + d));
                let (y0, y1) = (self.bucket(s.y - d), self.bucket(s.y + d));
                for bx in x0..=x1 {
                    for by in y0..=y1 {
                        for &k in buckets.get(&(bx, by)).into_iter().flatten() {
                            let (p, a) = self.entries[k];
                            if self.kernel.eval(p, s) {
                                out[a.index()] += 1;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Approximate visit count `sum_t κ(s_t, s) 1{a_t = a}`.
    pub fn n_approx(&self, s: Point, a: Direction) -> u64 {
        self.counts_at(s)[a.index()]
    }
}

/// Reference evaluation by linear scan.
pub fn n_approx_scan(
    entries: &[(Point, Direction)],
    kernel: IndicatorKernel,
    s: Point,
    a: Direction,
) -> u64 {
    entries
        .iter()
        .filter(|(p, b)| *b == a && kernel.eval(*p, s))
        .count() as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousPolicy {
    Uniform,
    /// Favor-least on kernel counts; `None` uses the cell width as `δ`.
    ApproxNf {
        delta: Option<f64>,
    },
}

impl ContinuousPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ContinuousPolicy::Uniform => "uniform",
            ContinuousPolicy::ApproxNf { .. } => "approx-nf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousConfig {
    /// Side length `D`.
    pub side: f64,
    /// Cells per axis `M`.
    pub cells: usize,
    pub motion: Motion,
    pub policy: ContinuousPolicy,
    pub step_cap: u64,
}

impl ContinuousConfig {
    pub fn new(side: f64, cells: usize, motion: Motion, policy: ContinuousPolicy) -> Self {
        ContinuousConfig {
            side,
            cells,
            motion,
            policy,
            step_cap: 1_000_000,
        }
    }

    pub fn cell_width(&self) -> f64 {
        self.side / self.cells as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::Parameter("D must be positive".into()));
        }
        if self.cells == 0 {
            return Err(Error::Parameter("M must be at least 1".into()));
        }
        if self.step_cap == 0 {
            return Err(Error::Parameter("step cap must be positive".into()));
        }
        Ok(())
    }

    /// Cell of `s`; the upper walls belong to the last row/column.
    pub fn cell_of(&self, s: Point) -> (usize, usize) {
        let w = self.cell_width();
        let idx = |v: f64| ((v / w).floor().max(0.0) as usize).min(self.cells - 1);
        (idx(s.x), idx(s.y))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousRecord {
    pub start: Point,
    pub steps: u64,
    pub t_cover: Option<u64>,
    pub cap_hit: bool,
    pub cells_visited: usize,
}

/// Walks until all `M²` cells have been entered or the cap is reached.
pub fn run_cover_continuous<R: Rng + ?Sized>(
    cfg: &ContinuousConfig,
    rng: &mut R,
) -> Result<ContinuousRecord> {
    cfg.validate()?;
    let m = cfg.cells;
    let mut seen = vec![false; m * m];
    let mut s = Point::new(
        rng.random::<f64>() * cfg.side,
        rng.random::<f64>() * cfg.side,
    );
    let start = s;
    let mark = |seen: &mut Vec<bool>, p: Point| {
        let (cx, cy) = cfg.cell_of(p);
        let slot = &mut seen[cx * m + cy];
        let fresh = !*slot;
        *slot = true;
        fresh
    };
    mark(&mut seen, s);
    let mut visited = 1;
    let mut history = match cfg.policy {
        ContinuousPolicy::Uniform => None,
        ContinuousPolicy::ApproxNf { delta } => Some(History::new(IndicatorKernel::new(
            delta.unwrap_or_else(|| cfg.cell_width()),
        )?)),
    };
    let mut steps = 0;
    while visited < m * m && steps < cfg.step_cap {
        let dir = match history.as_mut() {
            None => Direction::ALL[rng.random_range(0..4)],
            Some(h) => {
                let counts = h.counts_at(s);
                let least = *counts.iter().min().unwrap();
                let ties: Vec<Direction> = Direction::ALL
                    .into_iter()
                    .filter(|d| counts[d.index()] == least)
                    .collect();
                let d = ties[rng.random_range(0..ties.len())];
                h.push(s, d);
                d
            }
        };
        s = step(cfg.motion, dir, s, cfg.side, rng);
        steps += 1;
        if mark(&mut seen, s) {
            visited += 1;
        }
    }
    let covered = visited == m * m;
    Ok(ContinuousRecord {
        start,
        steps,
        t_cover: covered.then_some(steps),
        cap_hit: !covered,
        cells_visited: visited,
    })
}

/// Seeded parallel replications; records are in run order.
pub fn monte_carlo_continuous(
    cfg: &ContinuousConfig,
    n_runs: u64,
    seed_base: u64,
    workers: usize,
) -> Result<(McStats, Vec<ContinuousRecord>)> {
    cfg.validate()?;
    if n_runs == 0 {
        return Err(Error::Parameter("n_runs must be at least 1".into()));
    }
    let runs = replicate(n_runs, seed_base, workers, |_, rng| {
        run_cover_continuous(cfg, rng)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let values: Vec<Option<f64>> = runs.iter().map(|r| r.t_cover.map(|t| t as f64)).collect();
    Ok((McStats::from_values(&values, seed_base), runs))
}
