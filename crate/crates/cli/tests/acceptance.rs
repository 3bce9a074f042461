//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the report is always
//! printed. Exits non-zero when any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use coverlab::continuous::{monte_carlo_continuous, ContinuousConfig, ContinuousPolicy, Motion};
use coverlab::env::{make_btree, random_connected, EnvKind, Environment};
use coverlab::exact::{
    closed_form, enumerate_restricted_maze, hitting_times_rw, local_improvement_check,
    matthews_bounds, persistent_toy_t0, symmetric_means, PolicyKind,
};
use coverlab::policy::{PolicySpec, RepetitionDist};
use coverlab::scalar::binomial;
use coverlab::sim::{
    count_excursions, general_bound, monte_carlo_on, replicate, run_cover, run_walk, McStats,
    Measure, SimConfig, StopRule, WalkOptions,
};
use coverlab::{Exact, Graph, NodeId, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNS: u64 = 40_000;

struct Criterion {
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push((ok, detail.into()));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(ok, _)| *ok)
    }
}

fn mc(
    env: &Environment,
    policy: PolicySpec,
    measure: Measure,
    runs: u64,
    seed: u64,
    bounds: bool,
) -> coverlab::sim::McOutcome {
    let mut cfg = SimConfig::new(env.spec.kind, policy, runs, seed);
    cfg.measure = measure;
    cfg.bound_checks = bounds;
    monte_carlo_on(env, &cfg).expect("monte carlo")
}

fn stats(s: &McStats) -> String {
    format!("{:.4} ± {:.4}", s.mean, s.stderr)
}

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

fn star(c: &mut Criterion) {
    let env = EnvKind::Star { n: 10 }.build().unwrap();
    let nf = mc(
        &env,
        PolicySpec::NegativeFeedback,
        Measure::Cover,
        1000,
        1,
        false,
    );
    let at19 = nf
        .runs
        .iter()
        .filter(|r| r.record.t_cover == Some(19))
        .count();
    c.check(at19 == 1000, format!("nf T_C = 19 in {at19}/1000 runs"));
    let rw = mc(&env, PolicySpec::RandomWalk, Measure::Cover, RUNS, 2, false);
    let reference = 20.0 * harmonic(10) - 1.0;
    c.check(
        rw.stats.within(reference, 3.0),
        format!("rw {} vs {reference:.4}", stats(&rw.stats)),
    );
}

fn path(c: &mut Criterion) {
    let env = EnvKind::Path { n: 10 }.build().unwrap();
    let h = hitting_times_rw::<Exact>(&env.graph, NodeId(10)).unwrap();
    c.check(
        h[0] == Exact::from_usize(100),
        format!("rw hitting 0->10 = {}", h[0]),
    );
    let nf = mc(
        &env,
        PolicySpec::NegativeFeedback,
        Measure::Cover,
        RUNS,
        3,
        true,
    );
    let z = nf.stats.z_below(100.0);
    c.check(
        z > 3.0,
        format!("nf {} below 100 with z = {z:.1}", stats(&nf.stats)),
    );
    let lemma_fail = nf
        .runs
        .iter()
        .flat_map(|r| &r.bounds)
        .filter(|b| b.name == "path-returns" && !b.passed())
        .count();
    c.check(
        lemma_fail == 0,
        format!("returns to 0 before n exceed n-1 in {lemma_fail} runs"),
    );
    let env2 = EnvKind::Path { n: 2 }.build().unwrap();
    let nf2 = mc(
        &env2,
        PolicySpec::NegativeFeedback,
        Measure::Cover,
        RUNS,
        4,
        false,
    );
    c.check(
        nf2.stats.within(3.0, 3.0),
        format!("path(2) nf {} vs 3", stats(&nf2.stats)),
    );
}

fn circle(c: &mut Criterion) {
    let env = EnvKind::Circle { n: 10 }.build().unwrap();
    let rw = mc(&env, PolicySpec::RandomWalk, Measure::Cover, RUNS, 5, false);
    c.check(
        rw.stats.within(55.0, 3.0),
        format!("rw {} vs 55", stats(&rw.stats)),
    );
    let nf = mc(
        &env,
        PolicySpec::NegativeFeedback,
        Measure::Cover,
        RUNS,
        6,
        false,
    );
    let z = nf.stats.z_below(55.0);
    c.check(
        z > 3.0,
        format!("nf {} below 55 with z = {z:.1}", stats(&nf.stats)),
    );
}

fn clique(c: &mut Criterion) {
    let kind = EnvKind::Clique { n: 10 };
    let env = kind.build().unwrap();
    let form = closed_form(&kind, PolicyKind::RandomWalk).unwrap();
    let rw = mc(&env, PolicySpec::RandomWalk, Measure::Cover, RUNS, 7, false);
    c.check(
        (form.value - (1.0 + 9.0 * harmonic(9))).abs() < 1e-9 && rw.stats.within(form.value, 3.0),
        format!(
            "closed form {:.4} vs rw {} (z = {:.1})",
            form.value,
            stats(&rw.stats),
            rw.stats.z_below(form.value)
        ),
    );
    let nf = mc(
        &env,
        PolicySpec::NegativeFeedback,
        Measure::Cover,
        RUNS,
        8,
        false,
    );
    let z = rw.stats.z_versus(&nf.stats);
    c.check(
        z > 3.0,
        format!("nf {} below rw with z = {z:.1}", stats(&nf.stats)),
    );
}

fn toy_maze(c: &mut Criterion) {
    let env = EnvKind::ToyMaze.build().unwrap();
    let h = hitting_times_rw::<Exact>(&env.graph, NodeId(6)).unwrap();
    c.check(
        h[0] == Exact::from_usize(23),
        format!("rw hitting 0->6 = {}", h[0]),
    );

    let maze = enumerate_restricted_maze();
    let total = maze
        .paths
        .iter()
        .fold(Exact::from_usize(0), |acc, p| acc + p.prob.clone());
    c.check(
        maze.paths.len() == 15,
        format!(
            "restricted maze has {} paths (expected 15)",
            maze.paths.len()
        ),
    );
    c.check(
        total == Exact::from_usize(1),
        format!("path probabilities sum to {total}"),
    );
    c.check(
        maze.expectation == Exact::ratio(95, 12),
        format!(
            "restricted maze expectation {} (expected 95/12)",
            maze.expectation
        ),
    );

    let nf = mc(
        &env,
        PolicySpec::NegativeFeedback,
        Measure::Hit,
        RUNS,
        9,
        false,
    );
    let z = nf.stats.z_below(23.0);
    c.check(
        z > 3.0,
        format!("nf hitting {} below 23 with z = {z:.1}", stats(&nf.stats)),
    );

    c.check(
        persistent_toy_t0(Exact::from_usize(1)).unwrap() == Some(Exact::from_usize(23)),
        "T0(1) = 23",
    );
    let values: Vec<f64> = (0..=10)
        .map(|k| {
            persistent_toy_t0(k as f64 / 10.0)
                .unwrap()
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let decreasing = values.windows(2).all(|w| w[0] > w[1]);
    c.check(
        decreasing,
        format!(
            "T0 on a = 0, 0.1, ..., 1 decreasing: {:?}",
            values
                .iter()
                .map(|v| (v * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        ),
    );

    let half = persistent_toy_t0(0.5f64).unwrap().unwrap();
    let p = PolicySpec::TemporallyPersistent(RepetitionDist::one_or_two(0.5).unwrap());
    let sim = mc(&env, p, Measure::Hit, RUNS, 10, false);
    c.check(
        sim.stats.within(half, 3.0),
        format!("persistent(a=0.5) {} vs T0 = {half:.4}", stats(&sim.stats)),
    );
}

/// Mean excursion index of the first visit to `j` from `i`.
fn excursion_mean(g: &Graph, spec: &PolicySpec, i: NodeId, j: NodeId, seed: u64) -> McStats {
    let values = replicate(RUNS, seed, 0, |_, rng| {
        let opts = WalkOptions {
            step_cap: 10_000_000,
            stop: StopRule::Hit(j),
            target: Some(j),
            record_trajectory: true,
        };
        let rec = run_walk(g, spec, i, rng, opts);
        let traj = rec.trajectory.expect("trajectory");
        count_excursions(&traj, i, g.node_count())[j.0].map(|n| n as f64)
    })
    .unwrap();
    McStats::from_values(&values, seed)
}

fn local_improvement(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut graphs = Vec::new();
    let mut pairs = 0;
    let mut violations = 0;
    for _ in 0..50 {
        let n = rng.random_range(3..=8);
        let g = random_connected(n, 0.3, &mut rng).unwrap();
        for i in g.nodes() {
            for j in g.nodes().filter(|&j| j != i) {
                let chk = local_improvement_check::<f64>(&g, i, j).unwrap();
                pairs += 1;
                if !chk.holds {
                    violations += 1;
                }
            }
        }
        graphs.push(g);
    }
    c.check(
        violations == 0,
        format!("local <= rw on {pairs} ordered pairs, {violations} violations"),
    );

    for t in 0..5u64 {
        let g = &graphs[rng.random_range(0..graphs.len())];
        let i = NodeId(rng.random_range(0..g.node_count()));
        let j = loop {
            let j = NodeId(rng.random_range(0..g.node_count()));
            if j != i {
                break j;
            }
        };
        let chk = local_improvement_check::<f64>(g, i, j).unwrap();
        let (e_rw, e_loc) = (chk.e_rw.to_real(), chk.e_loc.to_real());
        let rw = excursion_mean(g, &PolicySpec::RandomWalk, i, j, 100 + t);
        let loc = excursion_mean(
            g,
            &PolicySpec::LocalNegativeFeedback { anchor: i },
            i,
            j,
            200 + t,
        );
        c.check(
            rw.within(e_rw, 3.0) && loc.within(e_loc, 3.0),
            format!(
                "triple {t} (m={}, {i}->{j}, K={}): rw {} vs {e_rw:.4}, local {} vs {e_loc:.4}",
                g.node_count(),
                g.degree(i),
                stats(&rw),
                stats(&loc)
            ),
        );
    }
}

fn brute_force_means(x: &[f64]) -> Vec<f64> {
    let k = x.len();
    let mut e = vec![0.0; k + 1];
    for mask in 0u32..(1 << k) {
        let prod: f64 = (0..k)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| x[b])
            .product();
        e[mask.count_ones() as usize] += prod;
    }
    (1..=k).map(|j| e[j] / binomial::<f64>(k, j)).collect()
}

fn maclaurin(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut chain_fail, mut oracle_fail) = (0, 0);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let k = rng.random_range(2..=12);
        let x: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let sm = symmetric_means(&x);
        if !sm.maclaurin_holds(1e-12) {
            chain_fail += 1;
        }
        for (a, b) in sm.s.iter().zip(brute_force_means(&x)) {
            worst = worst.max((a - b).abs());
            if (a - b).abs() > 1e-12 {
                oracle_fail += 1;
            }
        }
    }
    c.check(
        chain_fail == 0,
        format!("chain violated in {chain_fail}/10000 vectors"),
    );
    c.check(
        oracle_fail == 0,
        format!("max deviation from subset enumeration {worst:.2e}"),
    );
}

fn matthews(c: &mut Criterion) {
    let mut graphs: Vec<Graph> = [
        EnvKind::Path { n: 5 },
        EnvKind::Circle { n: 6 },
        EnvKind::Clique { n: 6 },
        EnvKind::Barbell { n: 4 },
    ]
    .iter()
    .map(|k| k.build().unwrap().graph)
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let n = rng.random_range(3..=12);
        graphs.push(random_connected(n, 0.25, &mut rng).unwrap());
    }
    let mut seed = 1000;
    for g in &graphs {
        let b = matthews_bounds::<f64>(g).unwrap();
        let mut outside = Vec::new();
        for s in g.nodes() {
            seed += 1;
            let values = replicate(20_000, seed, 0, |_, rng| {
                run_cover(g, &PolicySpec::RandomWalk, s, rng, 10_000_000)
                    .unwrap()
                    .t_cover
                    .map(|t| t as f64)
            })
            .unwrap();
            let st = McStats::from_values(&values, seed);
            if st.mean < b.lower - 4.0 * st.stderr || st.mean > b.upper + 4.0 * st.stderr {
                outside.push(format!("start {s}: {}", stats(&st)));
            }
        }
        c.check(
            outside.is_empty(),
            format!(
                "{} (m={}) in [{:.3}, {:.3}] from every start{}",
                g.name(),
                g.node_count(),
                b.lower,
                b.upper,
                if outside.is_empty() {
                    String::new()
                } else {
                    format!("; outside: {}", outside.join(", "))
                }
            ),
        );
    }
}

fn trees(c: &mut Criterion) {
    let env = make_btree(2, 6).unwrap();
    let nf = mc(
        &env,
        PolicySpec::NegativeFeedback,
        Measure::Cover,
        4000,
        41,
        true,
    );
    let failed = |name: &str| {
        nf.runs
            .iter()
            .flat_map(|r| &r.bounds)
            .filter(|b| b.name == name && !b.passed())
            .count()
    };
    let max_tc = nf
        .runs
        .iter()
        .filter_map(|r| r.record.t_cover)
        .max()
        .unwrap_or(0);
    c.check(
        failed("tree-cover") == 0,
        format!("T_C <= 4608 in every run (max {max_tc})"),
    );
    c.check(
        failed("tree-visits") == 0,
        format!(
            "per-node visits <= 36 before cover, {} violations",
            failed("tree-visits")
        ),
    );
    let rw = mc(
        &env,
        PolicySpec::RandomWalk,
        Measure::Cover,
        4000,
        42,
        false,
    );
    let z = rw.stats.z_versus(&nf.stats);
    c.check(
        z > 3.0,
        format!(
            "nf {} below rw {} with z = {z:.1}",
            stats(&nf.stats),
            stats(&rw.stats)
        ),
    );
    let asym = closed_form(&EnvKind::Btree { b: 2, h: 6 }, PolicyKind::RandomWalk)
        .unwrap()
        .value;
    let ratio = rw.stats.mean / asym;
    c.check(
        (0.5..=2.0).contains(&ratio),
        format!("rw / asymptote {asym:.1} = {ratio:.3}"),
    );
}

fn general(c: &mut Criterion) {
    let kinds = [
        EnvKind::Star { n: 10 },
        EnvKind::Path { n: 10 },
        EnvKind::Circle { n: 10 },
        EnvKind::Clique { n: 10 },
        EnvKind::Barbell { n: 5 },
        EnvKind::Btree { b: 2, h: 4 },
        EnvKind::Btree { b: 3, h: 3 },
        EnvKind::Grid1d { n: 10 },
        EnvKind::Grid2d { n1: 5, n2: 5 },
        EnvKind::Grid3d {
            n1: 3,
            n2: 3,
            n3: 3,
        },
        EnvKind::Multiroom { rooms: 2 },
        EnvKind::ToyMaze,
        EnvKind::Hanoi { discs: 3 },
        EnvKind::Hanoi { discs: 4 },
    ];
    let mut skipped = Vec::new();
    let mut failures = 0;
    let mut checked = 0;
    for (k, kind) in kinds.iter().enumerate() {
        let env = kind.build().unwrap();
        assert!(env.graph.node_count() <= 200);
        let nf = mc(
            &env,
            PolicySpec::NegativeFeedback,
            Measure::Cover,
            500,
            500 + k as u64,
            true,
        );
        for b in nf
            .runs
            .iter()
            .flat_map(|r| &r.bounds)
            .filter(|b| b.name == "general")
        {
            if b.failed() {
                failures += 1;
            } else if b.passed() {
                checked += 1;
            }
        }
        if general_bound(&env.graph).is_none() {
            skipped.push(format!("{}({})", kind.name(), kind.params_string()));
        }
    }
    c.check(
        failures == 0,
        format!(
            "{checked} runs within bound, {failures} violations; skipped (overflow): {}",
            if skipped.is_empty() {
                "none".to_string()
            } else {
                skipped.join(", ")
            }
        ),
    );
}

fn continuous(c: &mut Criterion) {
    let uniform = ContinuousConfig::new(5.0, 10, Motion::Brownian, ContinuousPolicy::Uniform);
    let approx = ContinuousConfig::new(
        5.0,
        10,
        Motion::Brownian,
        ContinuousPolicy::ApproxNf { delta: None },
    );
    let (u, _) = monte_carlo_continuous(&uniform, 5000, 61, 0).unwrap();
    let (a, _) = monte_carlo_continuous(&approx, 5000, 62, 0).unwrap();
    let z = u.z_versus(&a);
    c.check(
        z > 3.0 && u.cap_hits == 0 && a.cap_hits == 0,
        format!(
            "approx-nf {} below uniform {} with z = {z:.1}",
            stats(&a),
            stats(&u)
        ),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let min_levy = (0..100_000)
        .map(|_| Motion::Levy.sample_length(&mut rng))
        .fold(f64::INFINITY, f64::min);
    c.check(
        min_levy >= 1.0,
        format!("smallest Lévy length {min_levy:.4}"),
    );
    let mean = (0..100_000)
        .map(|_| Motion::Brownian.sample_length(&mut rng))
        .sum::<f64>()
        / 100_000.0;
    let target = (2.0 / std::f64::consts::PI).sqrt();
    c.check(
        (mean - target).abs() < 0.02,
        format!("half-normal mean {mean:.4} vs {target:.4}"),
    );
}

fn cli(args: &[&str], out: &Path, workers: usize) -> bool {
    let status = Command::new(env!("CARGO_BIN_EXE_coverlab"))
        .args(args)
        .arg("--workers")
        .arg(workers.to_string())
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("spawn coverlab");
    status.success()
}

fn reproducibility(c: &mut Criterion) {
    let invocations: &[(&[&str], &str)] = &[
        (
            &[
                "simulate", "--env", "grid2d", "--param", "n1=5", "--param", "n2=5", "--policy",
                "nf", "--runs", "300", "--seed", "5",
            ],
            "runs.csv",
        ),
        (
            &[
                "simulate",
                "--env",
                "btree",
                "--param",
                "b=2",
                "--param",
                "H=4",
                "--policy",
                "rw",
                "--runs",
                "300",
                "--seed",
                "9",
                "--check-bounds",
            ],
            "bounds.csv",
        ),
        (
            &[
                "compare",
                "--env",
                "toy_maze",
                "--measure",
                "hit",
                "--policy",
                "rw,nf,persistent",
                "--pdist",
                "1:0.5,2:0.5",
                "--runs",
                "500",
                "--seed",
                "3",
            ],
            "compare.csv",
        ),
        (
            &[
                "sweep", "--env", "star", "--sweep", "n=5,10", "--policy", "rw,nf", "--runs",
                "200", "--seed", "2",
            ],
            "sweep.csv",
        ),
        (
            &[
                "simulate",
                "--env",
                "cont2d",
                "--D",
                "5",
                "--M",
                "5",
                "--policy",
                "approx-nf",
                "--runs",
                "100",
                "--seed",
                "4",
            ],
            "runs.csv",
        ),
    ];
    let root = tempfile::tempdir().unwrap();
    for (k, (args, file)) in invocations.iter().enumerate() {
        let one = root.path().join(format!("{k}-w1"));
        let eight = root.path().join(format!("{k}-w8"));
        let ran = cli(args, &one, 1) && cli(args, &eight, 8);
        let a = std::fs::read(one.join(file)).ok();
        let same = ran
            && a.as_ref().is_some_and(|bytes| !bytes.is_empty())
            && a == std::fs::read(eight.join(file)).ok();
        let size = a.map_or(0, |b| b.len());
        c.check(
            same,
            format!(
                "{} {} {file} ({size} bytes) identical at 1 and 8 workers",
                args[0], args[2]
            ),
        );
    }
}

type Check = fn(&mut Criterion);

fn main() {
    let criteria: &[(&str, Check)] = &[
        ("star", star),
        ("path", path),
        ("circle", circle),
        ("clique", clique),
        ("toy-maze", toy_maze),
        ("local-improvement", local_improvement),
        ("maclaurin", maclaurin),
        ("matthews", matthews),
        ("tree-bounds", trees),
        ("general-bound", general),
        ("continuous-2d", continuous),
        ("reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let t0 = Instant::now();
        let mut c = Criterion::new();
        run(&mut c);
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!("{verdict} {name} ({:.1}s)", t0.elapsed().as_secs_f64());
        for (ok, detail) in &c.checks {
            println!("    [{}] {detail}", if *ok { "ok" } else { "FAIL" });
        }
        if !c.passed() {
            failed.push(*name);
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
