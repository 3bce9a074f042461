//! Generators for the benchmark graph families.
//!
//! Each generator returns an [`Environment`]: the graph plus the rule for
//! picking the start node and an optional target node. Grid-like families
//! label their arcs with a compass direction (see [`dir`]) so that the
//! temporally-persistent policy can keep moving the same way.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Arc, Graph, NodeId};

/// Direction labels shared by the grid-like families.
pub mod dir {
    pub const UP: u16 = 0;
    pub const DOWN: u16 = 1;
    pub const LEFT: u16 = 2;
    pub const RIGHT: u16 = 3;
    pub const FORWARD: u16 = 4;
    pub const BACK: u16 = 5;
}

/// Cells blocked inside every MultiRoom room (row, column).
pub const MULTIROOM_PILLARS: [(usize, usize); 4] = [(1, 1), (1, 3), (3, 1), (3, 3)];
/// Side length of a MultiRoom room.
pub const MULTIROOM_SIDE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvKind {
    Star { n: usize },
    Path { n: usize },
    Circle { n: usize },
    Clique { n: usize },
    Barbell { n: usize },
    Btree { b: usize, h: usize },
    Grid1d { n: usize },
    Grid2d { n1: usize, n2: usize },
    Grid3d { n1: usize, n2: usize, n3: usize },
    Multiroom { rooms: usize },
    ToyMaze,
    Hanoi { discs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartRule {
    Fixed(NodeId),
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub kind: EnvKind,
    pub start: StartRule,
    pub target: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub graph: Graph,
    pub spec: EnvSpec,
}

impl Environment {
    pub fn start_node<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        match self.spec.start {
            StartRule::Fixed(s) => s,
            StartRule::Uniform => NodeId(rng.random_range(0..self.graph.node_count())),
        }
    }

    pub fn fixed_start(&self) -> Option<NodeId> {
        match self.spec.start {
            StartRule::Fixed(s) => Some(s),
            StartRule::Uniform => None,
        }
    }
}

fn param_err(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(param_err(msg))
    }
}

impl EnvKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnvKind::Star { .. } => "star",
            EnvKind::Path { .. } => "path",
            EnvKind::Circle { .. } => "circle",
            EnvKind::Clique { .. } => "clique",
            EnvKind::Barbell { .. } => "barbell",
            EnvKind::Btree { .. } => "btree",
            EnvKind::Grid1d { .. } => "grid1d",
            EnvKind::Grid2d { .. } => "grid2d",
            EnvKind::Grid3d { .. } => "grid3d",
            EnvKind::Multiroom { .. } => "multiroom",
            EnvKind::ToyMaze => "toy_maze",
            EnvKind::Hanoi { .. } => "hanoi",
        }
    }

    /// Parameters as `key=value` pairs in a fixed order.
    pub fn params(&self) -> Vec<(String, String)> {
        let kv = |k: &str, v: usize| (k.to_string(), v.to_string());
        match *self {
            EnvKind::Star { n }
            | EnvKind::Path { n }
            | EnvKind::Circle { n }
            | EnvKind::Clique { n }
            | EnvKind::Barbell { n }
            | EnvKind::Grid1d { n } => vec![kv("n", n)],
            EnvKind::Btree { b, h } => vec![kv("b", b), kv("H", h)],
            EnvKind::Grid2d { n1, n2 } => vec![kv("n1", n1), kv("n2", n2)],
            EnvKind::Grid3d { n1, n2, n3 } => vec![kv("n1", n1), kv("n2", n2), kv("n3", n3)],
            EnvKind::Multiroom { rooms } => vec![kv("rooms", rooms)],
            EnvKind::ToyMaze => Vec::new(),
            EnvKind::Hanoi { discs } => vec![kv("discs", discs)],
        }
    }

    /// `k=v;k=v` rendering used in CSV rows.
    pub fn params_string(&self) -> String {
        self.params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Resolves a kind name and `key=value` parameters.
    ///
    /// `grid` sets every grid dimension at once.
    pub fn from_params(kind: &str, params: &[(String, String)]) -> Result<Self> {
        let mut map: HashMap<&str, usize> = HashMap::new();
        for (k, v) in params {
            let v: usize = v
                .parse()
                .map_err(|_| param_err(format!("{k}={v}: expected a nonnegative integer")))?;
            map.insert(k.as_str(), v);
        }
        let allowed: &[&str] = match kind {
            "star" | "path" | "circle" | "clique" | "barbell" | "grid1d" => &["n"],
            "btree" => &["b", "H", "h"],
            "grid2d" => &["n1", "n2", "grid"],
            "grid3d" => &["n1", "n2", "n3", "grid"],
            "multiroom" => &["rooms"],
            "toy_maze" => &[],
            "hanoi" => &["discs"],
            other => return Err(param_err(format!("unknown environment kind {other:?}"))),
        };
        if let Some(bad) = map.keys().find(|k| !allowed.contains(k)) {
            return Err(param_err(format!("unknown parameter {bad:?} for {kind}")));
        }
        let get = |k: &str| {
            map.get(k)
                .copied()
                .ok_or_else(|| param_err(format!("{kind} requires parameter {k}")))
        };
        let grid_dim = |k: &str| {
            map.get(k)
                .or_else(|| map.get("grid"))
                .copied()
                .ok_or_else(|| param_err(format!("{kind} requires parameter {k} (or grid)")))
        };
        Ok(match kind {
            "star" => EnvKind::Star { n: get("n")? },
            "path" => EnvKind::Path { n: get("n")? },
            "circle" => EnvKind::Circle { n: get("n")? },
            "clique" => EnvKind::Clique { n: get("n")? },
            "barbell" => EnvKind::Barbell { n: get("n")? },
            "grid1d" => EnvKind::Grid1d { n: get("n")? },
            "btree" => EnvKind::Btree {
                b: get("b")?,
                h: map
                    .get("H")
                    .or_else(|| map.get("h"))
                    .copied()
                    .ok_or_else(|| param_err("btree requires parameter H"))?,
            },
            "grid2d" => EnvKind::Grid2d {
                n1: grid_dim("n1")?,
                n2: grid_dim("n2")?,
            },
            "grid3d" => EnvKind::Grid3d {
                n1: grid_dim("n1")?,
                n2: grid_dim("n2")?,
                n3: grid_dim("n3")?,
            },
            "multiroom" => EnvKind::Multiroom {
                rooms: get("rooms")?,
            },
            "toy_maze" => EnvKind::ToyMaze,
            "hanoi" => EnvKind::Hanoi {
                discs: get("discs")?,
            },
            _ => unreachable!(),
        })
    }

    pub fn build(&self) -> Result<Environment> {
        match *self {
            EnvKind::Star { n } => make_star(n),
            EnvKind::Path { n } => make_path(n),
            EnvKind::Circle { n } => make_circle(n),
            EnvKind::Clique { n } => make_clique(n),
            EnvKind::Barbell { n } => make_barbell(n),
            EnvKind::Btree { b, h } => make_btree(b, h),
            EnvKind::Grid1d { n } => make_grid1d(n),
            EnvKind::Grid2d { n1, n2 } => make_grid2d(n1, n2),
            EnvKind::Grid3d { n1, n2, n3 } => make_grid3d(n1, n2, n3),
            EnvKind::Multiroom { rooms } => make_multiroom(rooms),
            EnvKind::ToyMaze => Ok(make_toy_maze()),
            EnvKind::Hanoi { discs } => make_hanoi(discs),
        }
    }
}

fn finish(
    kind: EnvKind,
    graph: Graph,
    start: StartRule,
    target: Option<NodeId>,
) -> Result<Environment> {
    let graph = graph.with_params(kind.params());
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(Environment {
        graph,
        spec: EnvSpec {
            kind,
            start,
            target,
        },
    })
}

fn labelled(to: usize, label: u16) -> Arc {
    Arc {
        to: NodeId(to),
        label,
    }
}

/// Centre node 0 joined to leaves `1..=n`.
pub fn make_star(n: usize) -> Result<Environment> {
    require(n >= 2, "star requires n >= 2")?;
    let edges: Vec<_> = (1..=n).map(|j| (0, j)).collect();
    let g = Graph::from_edges("star", n + 1, &edges)?;
    finish(EnvKind::Star { n }, g, StartRule::Fixed(NodeId(0)), None)
}

/// Nodes `0..=n` on a line, start 0, target `n`.
pub fn make_path(n: usize) -> Result<Environment> {
    require(n >= 2, "path requires n >= 2")?;
    let lists = (0..=n)
        .map(|i| {
            let mut arcs = Vec::with_capacity(2);
            if i > 0 {
                arcs.push(labelled(i - 1, dir::LEFT));
            }
            if i < n {
                arcs.push(labelled(i + 1, dir::RIGHT));
            }
            arcs
        })
        .collect();
    let g = Graph::from_arcs("path", lists)?;
    finish(
        EnvKind::Path { n },
        g,
        StartRule::Fixed(NodeId(0)),
        Some(NodeId(n)),
    )
}

/// Nodes `0..=n` on a cycle.
pub fn make_circle(n: usize) -> Result<Environment> {
    require(n >= 2, "circle requires n >= 2")?;
    let m = n + 1;
    let lists = (0..m)
        .map(|i| {
            vec![
                labelled((i + m - 1) % m, dir::LEFT),
                labelled((i + 1) % m, dir::RIGHT),
            ]
        })
        .collect();
    let g = Graph::from_arcs("circle", lists)?;
    finish(EnvKind::Circle { n }, g, StartRule::Fixed(NodeId(0)), None)
}

/// Complete graph on `n` nodes (degree `n - 1`).
pub fn make_clique(n: usize) -> Result<Environment> {
    require(n >= 2, "clique requires n >= 2")?;
    let g = Graph::from_edges("clique", n, &clique_edges(0, n))?;
    finish(EnvKind::Clique { n }, g, StartRule::Fixed(NodeId(0)), None)
}

fn clique_edges(offset: usize, n: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((offset + u, offset + v));
        }
    }
    edges
}

/// Two `n`-cliques on `0..n` and `n..2n` bridged by `n-1 -- n`; uniform start.
pub fn make_barbell(n: usize) -> Result<Environment> {
    require(n >= 2, "barbell requires n >= 2")?;
    let mut edges = clique_edges(0, n);
    edges.extend(clique_edges(n, n));
    edges.push((n - 1, n));
    let g = Graph::from_edges("barbell", 2 * n, &edges)?;
    finish(EnvKind::Barbell { n }, g, StartRule::Uniform, None)
}

/// Number of nodes of the balanced `b`-ary tree of depth `h`.
pub fn btree_size(b: usize, h: usize) -> usize {
    (0..=h).map(|d| b.pow(d as u32)).sum()
}

/// Balanced `b`-ary tree of depth `h`; node `i` has children `i*b+1 ..= i*b+b`.
///
/// The parent arc carries label 0 and child `k` label `k + 1`.
pub fn make_btree(b: usize, h: usize) -> Result<Environment> {
    require(b >= 2 && h >= 1, "btree requires b >= 2 and H >= 1")?;
    let m = btree_size(b, h);
    let internal = m - b.pow(h as u32);
    let lists = (0..m)
        .map(|i| {
            let mut arcs = Vec::with_capacity(b + 1);
            if i > 0 {
                arcs.push(labelled((i - 1) / b, 0));
            }
            if i < internal {
                arcs.extend((0..b).map(|k| labelled(i * b + k + 1, k as u16 + 1)));
            }
            arcs
        })
        .collect();
    let g = Graph::from_arcs("btree", lists)?;
    finish(
        EnvKind::Btree { b, h },
        g,
        StartRule::Fixed(NodeId(0)),
        None,
    )
}

/// `n` states on a line; end states only move inward. Uniform start.
pub fn make_grid1d(n: usize) -> Result<Environment> {
    require(n >= 2, "grid1d requires n >= 2")?;
    let lists = (0..n)
        .map(|i| {
            let mut arcs = Vec::with_capacity(2);
            if i > 0 {
                arcs.push(labelled(i - 1, dir::LEFT));
            }
            if i + 1 < n {
                arcs.push(labelled(i + 1, dir::RIGHT));
            }
            arcs
        })
        .collect();
    let g = Graph::from_arcs("grid1d", lists)?;
    finish(EnvKind::Grid1d { n }, g, StartRule::Uniform, None)
}

/// `n1 x n2` grid, node `r * n2 + c`; four actions per cell, walls are self-loops.
pub fn make_grid2d(n1: usize, n2: usize) -> Result<Environment> {
    require(n1 >= 2 && n2 >= 2, "grid2d requires n1, n2 >= 2")?;
    let id = |r: usize, c: usize| r * n2 + c;
    let mut lists = Vec::with_capacity(n1 * n2);
    for r in 0..n1 {
        for c in 0..n2 {
            let here = id(r, c);
            lists.push(vec![
                labelled(if r > 0 { id(r - 1, c) } else { here }, dir::UP),
                labelled(if r + 1 < n1 { id(r + 1, c) } else { here }, dir::DOWN),
                labelled(if c > 0 { id(r, c - 1) } else { here }, dir::LEFT),
                labelled(if c + 1 < n2 { id(r, c + 1) } else { here }, dir::RIGHT),
            ]);
        }
    }
    let g = Graph::from_arcs("grid2d", lists)?;
    finish(EnvKind::Grid2d { n1, n2 }, g, StartRule::Uniform, None)
}

/// `n1 x n2 x n3` grid, node `(i * n2 + j) * n3 + k`; six actions, walls are self-loops.
pub fn make_grid3d(n1: usize, n2: usize, n3: usize) -> Result<Environment> {
    require(
        n1 >= 2 && n2 >= 2 && n3 >= 2,
        "grid3d requires n1, n2, n3 >= 2",
    )?;
    let id = |i: usize, j: usize, k: usize| (i * n2 + j) * n3 + k;
    let mut lists = Vec::with_capacity(n1 * n2 * n3);
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                let here = id(i, j, k);
                lists.push(vec![
                    labelled(if i > 0 { id(i - 1, j, k) } else { here }, dir::UP),
                    labelled(if i + 1 < n1 { id(i + 1, j, k) } else { here }, dir::DOWN),
                    labelled(if j > 0 { id(i, j - 1, k) } else { here }, dir::LEFT),
                    labelled(if j + 1 < n2 { id(i, j + 1, k) } else { here }, dir::RIGHT),
                    labelled(if k > 0 { id(i, j, k - 1) } else { here }, dir::FORWARD),
                    labelled(if k + 1 < n3 { id(i, j, k + 1) } else { here }, dir::BACK),
                ]);
            }
        }
    }
    let g = Graph::from_arcs("grid3d", lists)?;
    finish(EnvKind::Grid3d { n1, n2, n3 }, g, StartRule::Uniform, None)
}

/// Rooms of [`MULTIROOM_SIDE`]² cells with [`MULTIROOM_PILLARS`] blocked,
/// placed left to right. Moving right from a room's bottom-right cell enters
/// the next room's top-left cell (and moving left goes back). Walls, pillars
/// and room borders are self-loops. Start is the first room's top-left cell,
/// target the last room's bottom-right cell.
pub fn make_multiroom(rooms: usize) -> Result<Environment> {
    require(rooms >= 1, "multiroom requires rooms >= 1")?;
    let side = MULTIROOM_SIDE;
    let open = |r: usize, c: usize| !MULTIROOM_PILLARS.contains(&(r, c));
    // dense ids over open cells, room-major then row-major
    let mut local = vec![None; side * side];
    let mut per_room = 0;
    for r in 0..side {
        for c in 0..side {
            if open(r, c) {
                local[r * side + c] = Some(per_room);
                per_room += 1;
            }
        }
    }
    let id = |room: usize, r: usize, c: usize| local[r * side + c].map(|l| room * per_room + l);
    let mut lists = Vec::with_capacity(rooms * per_room);
    for room in 0..rooms {
        for r in 0..side {
            for c in 0..side {
                let Some(here) = id(room, r, c) else { continue };
                let step = |rr: Option<usize>, cc: Option<usize>| match (rr, cc) {
                    (Some(rr), Some(cc)) if rr < side && cc < side => {
                        id(room, rr, cc).unwrap_or(here)
                    }
                    _ => here,
                };
                let mut right = step(Some(r), Some(c + 1));
                if (r, c) == (side - 1, side - 1) && room + 1 < rooms {
                    right = id(room + 1, 0, 0).unwrap();
                }
                let mut left = step(Some(r), c.checked_sub(1));
                if (r, c) == (0, 0) && room > 0 {
                    left = id(room - 1, side - 1, side - 1).unwrap();
                }
                lists.push(vec![
                    labelled(step(r.checked_sub(1), Some(c)), dir::UP),
                    labelled(step(Some(r + 1), Some(c)), dir::DOWN),
                    labelled(left, dir::LEFT),
                    labelled(right, dir::RIGHT),
                ]);
            }
        }
    }
    let target = id(rooms - 1, side - 1, side - 1).unwrap();
    let g = Graph::from_arcs("multiroom", lists)?;
    finish(
        EnvKind::Multiroom { rooms },
        g,
        StartRule::Fixed(NodeId(0)),
        Some(NodeId(target)),
    )
}

/// The 3x3 maze with two blocked cells:
///
/// ```text
///   1  #  5
///   0  3  4
///   2  #  6
/// ```
///
/// Start is 0, target is 6. Only moves into open cells exist as actions.
pub fn make_toy_maze() -> Environment {
    use dir::*;
    let lists = vec![
        vec![labelled(1, UP), labelled(2, DOWN), labelled(3, RIGHT)],
        vec![labelled(0, DOWN)],
        vec![labelled(0, UP)],
        vec![labelled(0, LEFT), labelled(4, RIGHT)],
        vec![labelled(5, UP), labelled(6, DOWN), labelled(3, LEFT)],
        vec![labelled(4, DOWN)],
        vec![labelled(4, UP)],
    ];
    let g = Graph::from_arcs("toy_maze", lists).expect("static maze is well formed");
    finish(
        EnvKind::ToyMaze,
        g,
        StartRule::Fixed(NodeId(0)),
        Some(NodeId(6)),
    )
    .expect("static maze is connected")
}

/// Tower of Hanoi state graph with three pegs.
///
/// A state assigns each disc a peg; node id is `sum peg(d) * 3^d` with disc
/// 0 the smallest. Actions are the legal moves in `(from, to)` order,
/// labelled `3 * from + to`. Start: all discs on peg 0; target: all on peg 2.
pub fn make_hanoi(discs: usize) -> Result<Environment> {
    require((1..=8).contains(&discs), "hanoi requires 1 <= discs <= 8")?;
    let m = 3usize.pow(discs as u32);
    let pegs_of = |mut s: usize| {
        let mut pegs = vec![0usize; discs];
        for p in pegs.iter_mut() {
            *p = s % 3;
            s /= 3;
        }
        pegs
    };
    let mut lists = Vec::with_capacity(m);
    for s in 0..m {
        let pegs = pegs_of(s);
        // smallest disc on each peg
        let top = |peg: usize| pegs.iter().position(|&p| p == peg);
        let mut arcs = Vec::new();
        for from in 0..3 {
            let Some(d) = top(from) else { continue };
            for to in 0..3 {
                if to == from {
                    continue;
                }
                if top(to).is_some_and(|t| t < d) {
                    continue;
                }
                let next = s - from * 3usize.pow(d as u32) + to * 3usize.pow(d as u32);
                arcs.push(labelled(next, (3 * from + to) as u16));
            }
        }
        lists.push(arcs);
    }
    let g = Graph::from_arcs("hanoi", lists)?;
    finish(
        EnvKind::Hanoi { discs },
        g,
        StartRule::Fixed(NodeId(0)),
        Some(NodeId(m - 1)),
    )
}

/// Random connected simple graph on `n` nodes: a random recursive tree plus
/// each remaining pair independently with probability `extra_edge_prob`.
pub fn random_connected<R: Rng + ?Sized>(
    n: usize,
    extra_edge_prob: f64,
    rng: &mut R,
) -> Result<Graph> {
    require(n >= 2, "random graph requires n >= 2")?;
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v));
        present.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.random_bool(extra_edge_prob) {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::from_edges("random", n, &edges)?;
    debug_assert!(g.is_connected());
    Ok(g)
}
