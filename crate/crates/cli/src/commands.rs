use std::path::{Path, PathBuf};

use coverlab::continuous::monte_carlo_continuous;
use coverlab::env::{EnvKind, Environment};
use coverlab::exact::{
    closed_form, cover_time_rw, enumerate_restricted_maze, hitting_times_rw, matthews_bounds,
    persistent_toy_t0, PolicyKind, COVER_DP_MAX_NODES,
};
use coverlab::sim::{
    general_bound, monte_carlo_on, BoundCheck, BoundStatus, McStats, Measure, SimConfig,
};
use coverlab::{Exact, Scalar};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    Cli, Command, EnvArgs, ExactArgs, MeasureArg, ReplayArgs, RunArgs, SimArgs, SweepArgs,
};
use crate::error::CliError;
use crate::output::{write_csv, write_json, Manifest};
use crate::setup::{parse_kv, resolve_policies, resolve_target, PolicyChoice, Target};

/// Runs a parsed command line; `argv` is recorded in the manifest.
pub fn execute(cli: Cli, argv: &[String]) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => generate(&args, argv),
        Command::Simulate(args) => simulate(&args, argv),
        Command::Exact(args) => exact(&args, argv),
        Command::Compare(args) => compare(&args, argv),
        Command::Sweep(args) => sweep(&args, argv),
        Command::Replay(args) => replay(&args),
    }
}

fn resolve_seed(run: &RunArgs) -> Result<(u64, Option<String>), CliError> {
    match run.seed {
        Some(s) => Ok((s, None)),
        None if std::env::var_os("CI").is_some_and(|v| !v.is_empty()) => {
            Err(CliError::Usage("--seed is required when CI is set".into()))
        }
        None => {
            eprintln!("warning: no --seed given, using 0");
            Ok((0, Some("no --seed given; seed 0 used".into())))
        }
    }
}

fn build_env(target: &Target) -> Result<Option<Environment>, CliError> {
    match target {
        Target::Graph(kind) => Ok(Some(kind.build()?)),
        Target::Continuous(_) => Ok(None),
    }
}

/// One row of the per-run CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunRow {
    pub env: &'static str,
    pub params: String,
    pub policy: &'static str,
    pub seed_base: u64,
    pub run_id: u64,
    pub t_cover: Option<u64>,
    pub t_hit: Option<u64>,
    pub cap_hit: bool,
}

#[derive(Debug, Clone, Serialize)]
struct BoundRow {
    run_id: u64,
    name: String,
    observed: Option<u64>,
    bound: Option<f64>,
    status: &'static str,
    reason: String,
}

struct Batch {
    stats: McStats,
    rows: Vec<RunRow>,
    bounds: Vec<BoundRow>,
}

impl Batch {
    fn bound_failures(&self) -> usize {
        self.bounds.iter().filter(|b| b.status == "fail").count()
    }
}

fn bound_rows(run_id: u64, checks: &[BoundCheck]) -> impl Iterator<Item = BoundRow> + '_ {
    checks.iter().map(move |c| {
        let (status, reason) = match &c.status {
            BoundStatus::Pass => ("pass", String::new()),
            BoundStatus::Fail => ("fail", String::new()),
            BoundStatus::Skipped { reason } => ("skipped", reason.clone()),
        };
        BoundRow {
            run_id,
            name: c.name.clone(),
            observed: c.observed,
            bound: c.bound,
            status,
            reason,
        }
    })
}

fn run_batch(
    target: &Target,
    env: Option<&Environment>,
    policy: &PolicyChoice,
    run: &RunArgs,
    seed: u64,
) -> Result<Batch, CliError> {
    let params = target.params_string();
    let label = policy.label();
    match (target, policy, env) {
        (Target::Graph(kind), PolicyChoice::Graph(spec), Some(env)) => {
            let mut cfg = SimConfig::new(*kind, spec.clone(), run.runs, seed);
            cfg.measure = match run.measure {
                MeasureArg::Cover => Measure::Cover,
                MeasureArg::Hit => Measure::Hit,
            };
            cfg.step_cap = run.step_cap;
            cfg.bound_checks = run.check_bounds;
            cfg.workers = run.workers;
            let outcome = monte_carlo_on(env, &cfg)?;
            let rows = outcome
                .runs
                .iter()
                .map(|r| RunRow {
                    env: kind.name(),
                    params: params.clone(),
                    policy: label,
                    seed_base: seed,
                    run_id: r.run_id,
                    t_cover: r.record.t_cover,
                    t_hit: r.record.t_hit,
                    cap_hit: r.record.cap_hit,
                })
                .collect();
            let bounds = outcome
                .runs
                .iter()
                .flat_map(|r| bound_rows(r.run_id, &r.bounds))
                .collect();
            Ok(Batch {
                stats: outcome.stats,
                rows,
                bounds,
            })
        }
        (Target::Continuous(setup), PolicyChoice::Continuous(p), None) => {
            if run.measure == MeasureArg::Hit {
                return Err(CliError::Usage("cont2d only measures cover time".into()));
            }
            if run.check_bounds {
                return Err(CliError::Usage(
                    "--check-bounds applies to graph environments".into(),
                ));
            }
            if run.runs == 0 {
                return Err(CliError::Usage("--runs must be at least 1".into()));
            }
            let cfg = setup.config(*p, run.step_cap);
            let (stats, records) = monte_carlo_continuous(&cfg, run.runs, seed, run.workers)?;
            let rows = records
                .iter()
                .enumerate()
                .map(|(i, r)| RunRow {
                    env: "cont2d",
                    params: params.clone(),
                    policy: label,
                    seed_base: seed,
                    run_id: i as u64,
                    t_cover: r.t_cover,
                    t_hit: None,
                    cap_hit: r.cap_hit,
                })
                .collect();
            Ok(Batch {
                stats,
                rows,
                bounds: Vec::new(),
            })
        }
        _ => Err(CliError::Internal(
            "policy does not match environment".into(),
        )),
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    env: &'static str,
    params: String,
    policy: &'static str,
    measure: &'static str,
    n_runs: u64,
    mean: f64,
    stderr: f64,
    cap_hits: u64,
    seed_base: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_failures: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn measure_name(m: MeasureArg) -> &'static str {
    match m {
        MeasureArg::Cover => "cover",
        MeasureArg::Hit => "hit",
    }
}

fn warnings(seed_note: &Option<String>, cap_hits: u64) -> Option<String> {
    let mut notes: Vec<String> = seed_note.iter().cloned().collect();
    if cap_hits > 0 {
        notes.push(format!(
            "{cap_hits} runs hit the step cap and are excluded from the mean"
        ));
    }
    (!notes.is_empty()).then(|| notes.join("; "))
}

fn sim_config_json(target: &Target, policies: &[PolicyChoice], run: &RunArgs, seed: u64) -> Value {
    json!({
        "env": target,
        "env_name": target.name(),
        "policies": policies,
        "measure": measure_name(run.measure),
        "runs": run.runs,
        "seed_base": seed,
        "step_cap": run.step_cap,
        "check_bounds": run.check_bounds,
    })
}

fn prepare_out(out: &Option<PathBuf>) -> Result<Option<&Path>, CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn simulate(args: &SimArgs, argv: &[String]) -> Result<(), CliError> {
    let (seed, seed_note) = resolve_seed(&args.run)?;
    let target = resolve_target(&args.env, &[])?;
    let env = build_env(&target)?;
    let policies = resolve_policies(&args.policy, &target, env.as_ref())?;
    if policies.len() != 1 {
        return Err(CliError::Usage(
            "simulate takes a single policy; use compare for several".into(),
        ));
    }
    let batch = run_batch(&target, env.as_ref(), &policies[0], &args.run, seed)?;
    let summary = Summary {
        env: target.name(),
        params: target.params_string(),
        policy: policies[0].label(),
        measure: measure_name(args.run.measure),
        n_runs: batch.stats.n_runs,
        mean: batch.stats.mean,
        stderr: batch.stats.stderr,
        cap_hits: batch.stats.cap_hits,
        seed_base: seed,
        bound_failures: args.run.check_bounds.then(|| batch.bound_failures()),
        warning: warnings(&seed_note, batch.stats.cap_hits),
    };
    let text = serde_json::to_string_pretty(&summary)?;
    if let Some(dir) = prepare_out(&args.env.out)? {
        let mut outputs = vec!["runs.csv".to_string(), "summary.json".to_string()];
        write_csv(&dir.join("runs.csv"), &batch.rows)?;
        write_json(&dir.join("summary.json"), &text)?;
        if args.run.check_bounds {
            write_csv(&dir.join("bounds.csv"), &batch.bounds)?;
            outputs.push("bounds.csv".into());
        }
        Manifest::new(
            "simulate",
            argv,
            sim_config_json(&target, &policies, &args.run, seed),
            Some(seed),
            outputs,
        )
        .write(dir)?;
    }
    println!("{text}");
    Ok(())
}

fn z_column_names(labels: &[&str]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for label in labels {
        let base = format!("z_vs_{label}");
        let mut name = base.clone();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        names.push(name);
    }
    names
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn compare(args: &SimArgs, argv: &[String]) -> Result<(), CliError> {
    let (seed, seed_note) = resolve_seed(&args.run)?;
    let target = resolve_target(&args.env, &[])?;
    let env = build_env(&target)?;
    let policies = resolve_policies(&args.policy, &target, env.as_ref())?;
    if policies.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two policies".into(),
        ));
    }
    let batches = policies
        .iter()
        .map(|p| run_batch(&target, env.as_ref(), p, &args.run, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<&str> = policies.iter().map(|p| p.label()).collect();
    let mut header: Vec<String> = [
        "env", "params", "policy", "n_runs", "mean", "stderr", "cap_hits",
    ]
    .map(String::from)
    .to_vec();
    header.extend(z_column_names(&labels));
    let mut table = vec![header];
    for (b, label) in batches.iter().zip(&labels) {
        let mut row = vec![
            target.name().to_string(),
            target.params_string(),
            label.to_string(),
            b.stats.n_runs.to_string(),
            fmt_f64(b.stats.mean),
            fmt_f64(b.stats.stderr),
            b.stats.cap_hits.to_string(),
        ];
        row.extend(batches.iter().map(|o| fmt_f64(b.stats.z_versus(&o.stats))));
        table.push(row);
    }
    let total_caps: u64 = batches.iter().map(|b| b.stats.cap_hits).sum();
    if let Some(w) = warnings(&seed_note, total_caps) {
        eprintln!("warning: {w}");
    }
    let text = crate::output::csv_string(&table)?;
    if let Some(dir) = prepare_out(&args.env.out)? {
        std::fs::write(dir.join("compare.csv"), &text)?;
        let rows: Vec<&RunRow> = batches.iter().flat_map(|b| &b.rows).collect();
        write_csv(&dir.join("runs.csv"), &rows)?;
        let outputs = vec!["compare.csv".to_string(), "runs.csv".to_string()];
        Manifest::new(
            "compare",
            argv,
            sim_config_json(&target, &policies, &args.run, seed),
            Some(seed),
            outputs,
        )
        .write(dir)?;
    }
    print!("{text}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    env: &'static str,
    param: String,
    param_value: String,
    policy: &'static str,
    n_runs: u64,
    mean: f64,
    stderr: f64,
    cap_hits: u64,
}

fn sweep(args: &SweepArgs, argv: &[String]) -> Result<(), CliError> {
    let (seed, seed_note) = resolve_seed(&args.sim.run)?;
    let (key, values) = parse_kv(&args.sweep)?;
    let values: Vec<&str> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage("--sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    let mut configs = Vec::new();
    for v in &values {
        let target = resolve_target(&args.sim.env, &[(key.clone(), v.to_string())])?;
        let env = build_env(&target)?;
        let policies = resolve_policies(&args.sim.policy, &target, env.as_ref())?;
        for p in &policies {
            let b = run_batch(&target, env.as_ref(), p, &args.sim.run, seed)?;
            rows.push(SweepRow {
                env: target.name(),
                param: key.clone(),
                param_value: v.to_string(),
                policy: p.label(),
                n_runs: b.stats.n_runs,
                mean: b.stats.mean,
                stderr: b.stats.stderr,
                cap_hits: b.stats.cap_hits,
            });
        }
        configs.push(sim_config_json(&target, &policies, &args.sim.run, seed));
    }
    let total_caps: u64 = rows.iter().map(|r| r.cap_hits).sum();
    if let Some(w) = warnings(&seed_note, total_caps) {
        eprintln!("warning: {w}");
    }
    let text = crate::output::serialize_csv(&rows)?;
    if let Some(dir) = prepare_out(&args.sim.env.out)? {
        std::fs::write(dir.join("sweep.csv"), &text)?;
        Manifest::new(
            "sweep",
            argv,
            Value::Array(configs),
            Some(seed),
            vec!["sweep.csv".into()],
        )
        .write(dir)?;
    }
    print!("{text}");
    Ok(())
}

fn generate(args: &EnvArgs, argv: &[String]) -> Result<(), CliError> {
    let target = resolve_target(args, &[])?;
    let Some(env) = build_env(&target)? else {
        return Err(CliError::Usage("cont2d is not a graph".into()));
    };
    let text = env.graph.to_adjacency_text();
    if let Some(dir) = prepare_out(&args.out)? {
        std::fs::write(dir.join("graph.txt"), &text)?;
        Manifest::new(
            "generate",
            argv,
            json!({ "env": target }),
            None,
            vec!["graph.txt".into()],
        )
        .write(dir)?;
    }
    print!("{text}");
    Ok(())
}

fn require_graph(target: &Target) -> Result<(EnvKind, Environment), CliError> {
    match target {
        Target::Graph(kind) => Ok((*kind, kind.build()?)),
        Target::Continuous(_) => Err(CliError::Usage(
            "exact quantities need a graph environment".into(),
        )),
    }
}

fn fixed_start(env: &Environment) -> Result<coverlab::NodeId, CliError> {
    env.fixed_start()
        .ok_or_else(|| CliError::Usage(format!("{} has a random start node", env.spec.kind.name())))
}

fn exact(args: &ExactArgs, argv: &[String]) -> Result<(), CliError> {
    let target = resolve_target(&args.env, &[])?;
    let (kind, env) = require_graph(&target)?;
    let g = &env.graph;
    let mut out = serde_json::Map::new();
    out.insert("env".into(), json!(kind.name()));
    out.insert("params".into(), json!(kind.params_string()));
    out.insert("quantity".into(), json!(args.quantity));
    let (form, value): (&str, Value) = match args.quantity.as_str() {
        "rw-hitting" => {
            let t = env
                .spec
                .target
                .ok_or_else(|| CliError::Usage(format!("{} has no target node", kind.name())))?;
            let s = fixed_start(&env)?;
            if g.node_count() <= 200 {
                let h = hitting_times_rw::<Exact>(g, t)?;
                out.insert("rational".into(), json!(h[s.0].to_string()));
                ("exact", json!(h[s.0].to_real()))
            } else {
                ("exact", json!(hitting_times_rw::<f64>(g, t)?[s.0]))
            }
        }
        "rw-cover" | "nf-cover" => {
            let policy = if args.quantity == "rw-cover" {
                PolicyKind::RandomWalk
            } else {
                PolicyKind::NegativeFeedback
            };
            match closed_form(&kind, policy) {
                Ok(c) => {
                    out.insert("formula".into(), json!(c.description));
                    (c.kind.as_str(), json!(c.value))
                }
                Err(_)
                    if policy == PolicyKind::RandomWalk && g.node_count() <= COVER_DP_MAX_NODES =>
                {
                    let v = cover_time_rw::<Exact>(g, fixed_start(&env)?)?;
                    out.insert("rational".into(), json!(v.to_string()));
                    ("exact", json!(v.to_real()))
                }
                Err(e) => return Err(e.into()),
            }
        }
        "matthews-lower" | "matthews-upper" => {
            let b = matthews_bounds::<f64>(g)?;
            out.insert("mu_minus".into(), json!(b.mu_minus));
            out.insert("mu_plus".into(), json!(b.mu_plus));
            if args.quantity == "matthews-lower" {
                ("lower-bound", json!(b.lower))
            } else {
                ("upper-bound", json!(b.upper))
            }
        }
        "general-bound" => match general_bound(g) {
            Some(v) => ("upper-bound", json!(v)),
            None => {
                out.insert("note".into(), json!("bound exceeds u64"));
                ("upper-bound", Value::Null)
            }
        },
        "persistent-t0" => {
            if kind != EnvKind::ToyMaze {
                return Err(CliError::Usage(
                    "persistent-t0 is defined on toy_maze".into(),
                ));
            }
            let a = args
                .a
                .ok_or_else(|| CliError::Usage("persistent-t0 needs --a".into()))?;
            out.insert("a".into(), json!(a));
            match persistent_toy_t0(a)? {
                Some(v) => ("exact", json!(v)),
                None => {
                    out.insert("infinite".into(), json!(true));
                    ("exact", Value::Null)
                }
            }
        }
        "restricted-maze" => {
            if kind != EnvKind::ToyMaze {
                return Err(CliError::Usage(
                    "restricted-maze is defined on toy_maze".into(),
                ));
            }
            let maze = enumerate_restricted_maze();
            out.insert("paths".into(), json!(maze.paths.len()));
            out.insert("rational".into(), json!(maze.expectation.to_string()));
            ("exact", json!(maze.expectation.to_real()))
        }
        other => return Err(CliError::Usage(format!("unsupported quantity {other:?}"))),
    };
    out.insert("kind".into(), json!(form));
    out.insert("value".into(), value);
    let text = serde_json::to_string_pretty(&Value::Object(out))?;
    if let Some(dir) = prepare_out(&args.env.out)? {
        write_json(&dir.join("exact.json"), &text)?;
        let config = json!({ "env": target, "quantity": args.quantity, "a": args.a });
        Manifest::new("exact", argv, config, None, vec!["exact.json".into()]).write(dir)?;
    }
    println!("{text}");
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let manifest = Manifest::read(&args.manifest)?;
    let mut argv = vec!["coverlab".to_string()];
    argv.extend(manifest.args.iter().cloned());
    let mut cli = <Cli as clap::Parser>::try_parse_from(&argv)
        .map_err(|e| CliError::Usage(format!("manifest arguments no longer parse: {e}")))?;
    if let Some(out) = &args.out {
        match &mut cli.command {
            Command::Generate(a) => a.out = Some(out.clone()),
            Command::Simulate(a) | Command::Compare(a) => a.env.out = Some(out.clone()),
            Command::Exact(a) => a.env.out = Some(out.clone()),
            Command::Sweep(a) => a.sim.env.out = Some(out.clone()),
            Command::Replay(_) => return Err(CliError::Usage("manifest records a replay".into())),
        }
    }
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("manifest records a replay".into()));
    }
    execute(cli, &manifest.args)
}
