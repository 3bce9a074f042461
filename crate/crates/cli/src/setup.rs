//! Turns command-line strings into library configurations.

use coverlab::continuous::{ContinuousConfig, ContinuousPolicy, Motion};
use coverlab::env::{EnvKind, Environment};
use coverlab::policy::{PolicySpec, RepetitionDist};
use coverlab::NodeId;
use serde::Serialize;

use crate::args::{EnvArgs, MotionArg, PolicyArgs};
use crate::error::CliError;

const DEFAULT_HARMONIC_MAX: u32 = 10;

/// Resolved `--env` selection.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Target {
    Graph(EnvKind),
    Continuous(ContinuousSetup),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousSetup {
    pub side: f64,
    pub cells: usize,
    pub motion: Motion,
}

impl ContinuousSetup {
    pub fn config(&self, policy: ContinuousPolicy, step_cap: Option<u64>) -> ContinuousConfig {
        let mut cfg = ContinuousConfig::new(self.side, self.cells, self.motion, policy);
        if let Some(cap) = step_cap {
            cfg.step_cap = cap;
        }
        cfg
    }
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::Graph(kind) => kind.name(),
            Target::Continuous(_) => "cont2d",
        }
    }

    pub fn params_string(&self) -> String {
        match self {
            Target::Graph(kind) => kind.params_string(),
            Target::Continuous(c) => format!(
                "D={};M={};motion={}",
                c.side,
                c.cells,
                motion_name(c.motion)
            ),
        }
    }
}

pub fn motion_name(m: Motion) -> &'static str {
    match m {
        Motion::Brownian => "brownian",
        Motion::Levy => "levy",
    }
}

pub fn parse_kv(s: &str) -> Result<(String, String), CliError> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => {
            Ok((k.trim().to_string(), v.trim().to_string()))
        }
        _ => Err(CliError::Usage(format!("expected key=value, got {s:?}"))),
    }
}

/// Builds the target from `--env`, the `--param` list and the continuous
/// shorthands, with `extra` parameters taking precedence.
pub fn resolve_target(args: &EnvArgs, extra: &[(String, String)]) -> Result<Target, CliError> {
    let mut params = args
        .params
        .iter()
        .map(|p| parse_kv(p))
        .collect::<Result<Vec<_>, _>>()?;
    if args.env == "cont2d" {
        if let Some(d) = args.side {
            params.push(("D".into(), d.to_string()));
        }
        if let Some(m) = args.cells {
            params.push(("M".into(), m.to_string()));
        }
        if let Some(m) = args.motion {
            let name = match m {
                MotionArg::Brownian => "brownian",
                MotionArg::Levy => "levy",
            };
            params.push(("motion".into(), name.into()));
        }
    } else if args.side.is_some() || args.cells.is_some() || args.motion.is_some() {
        return Err(CliError::Usage(
            "--D, --M and --motion only apply to cont2d".into(),
        ));
    }
    params.extend(extra.iter().cloned());
    // later entries win
    let mut merged: Vec<(String, String)> = Vec::new();
    for (k, v) in params {
        merged.retain(|(mk, _)| *mk != k);
        merged.push((k, v));
    }
    if args.env == "cont2d" {
        return continuous_target(&merged).map(Target::Continuous);
    }
    Ok(Target::Graph(EnvKind::from_params(&args.env, &merged)?))
}

fn continuous_target(params: &[(String, String)]) -> Result<ContinuousSetup, CliError> {
    let mut setup = ContinuousSetup {
        side: 5.0,
        cells: 10,
        motion: Motion::Brownian,
    };
    for (k, v) in params {
        let bad = || CliError::Usage(format!("cont2d: invalid {k}={v}"));
        match k.as_str() {
            "D" => setup.side = v.parse().map_err(|_| bad())?,
            "M" => setup.cells = v.parse().map_err(|_| bad())?,
            "motion" => {
                setup.motion = match v.as_str() {
                    "brownian" => Motion::Brownian,
                    "levy" => Motion::Levy,
                    _ => return Err(bad()),
                }
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown parameter {k:?} for cont2d"
                )))
            }
        }
    }
    if !(setup.side > 0.0 && setup.side.is_finite()) || setup.cells == 0 {
        return Err(CliError::Usage("cont2d requires D > 0 and M >= 1".into()));
    }
    Ok(setup)
}

/// A policy in the form the selected target understands.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum PolicyChoice {
    Graph(PolicySpec),
    Continuous(#[serde(serialize_with = "ser_continuous")] ContinuousPolicy),
}

fn ser_continuous<S: serde::Serializer>(p: &ContinuousPolicy, s: S) -> Result<S::Ok, S::Error> {
    match p {
        ContinuousPolicy::Uniform => s.serialize_str("uniform"),
        ContinuousPolicy::ApproxNf { delta } => {
            use serde::ser::SerializeStruct;
            let mut st = s.serialize_struct("approx_nf", 1)?;
            st.serialize_field("delta", delta)?;
            st.end()
        }
    }
}

impl PolicyChoice {
    pub fn label(&self) -> &'static str {
        match self {
            PolicyChoice::Graph(p) => p.name(),
            PolicyChoice::Continuous(p) => p.name(),
        }
    }
}

pub fn parse_pdist(s: &str) -> Result<RepetitionDist, CliError> {
    if s == "harmonic" {
        return Ok(RepetitionDist::harmonic(DEFAULT_HARMONIC_MAX));
    }
    if let Some(z) = s.strip_prefix("harmonic:") {
        let z: u32 = z
            .parse()
            .map_err(|_| CliError::Usage(format!("bad harmonic cutoff {z:?}")))?;
        if z == 0 {
            return Err(CliError::Usage("harmonic cutoff must be positive".into()));
        }
        return Ok(RepetitionDist::harmonic(z));
    }
    let mut support = Vec::new();
    let mut probs = Vec::new();
    for part in s.split(',') {
        let (z, p) = part
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("--pdist entry {part:?} is not z:p")))?;
        support.push(
            z.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad repetition count {z:?}")))?,
        );
        probs.push(
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad probability {p:?}")))?,
        );
    }
    Ok(RepetitionDist::new(support, probs)?)
}

/// Parses the comma-separated `--policy` list against the target.
pub fn resolve_policies(
    args: &PolicyArgs,
    target: &Target,
    env: Option<&Environment>,
) -> Result<Vec<PolicyChoice>, CliError> {
    let names: Vec<&str> = args
        .policy
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(CliError::Usage("--policy is empty".into()));
    }
    names
        .into_iter()
        .map(|name| resolve_policy(name, args, target, env))
        .collect()
}

fn resolve_policy(
    name: &str,
    args: &PolicyArgs,
    target: &Target,
    env: Option<&Environment>,
) -> Result<PolicyChoice, CliError> {
    match target {
        Target::Continuous(_) => match name {
            "uniform" | "rw" => Ok(PolicyChoice::Continuous(ContinuousPolicy::Uniform)),
            "approx-nf" | "nf" => {
                if let Some(d) = args.delta {
                    if d.is_nan() || d < 0.0 {
                        return Err(CliError::Usage("--delta must be non-negative".into()));
                    }
                }
                Ok(PolicyChoice::Continuous(ContinuousPolicy::ApproxNf {
                    delta: args.delta,
                }))
            }
            other => Err(CliError::Usage(format!(
                "unknown cont2d policy {other:?} (uniform, approx-nf)"
            ))),
        },
        Target::Graph(_) => {
            let spec = match name {
                "rw" => PolicySpec::RandomWalk,
                "nf" => PolicySpec::NegativeFeedback,
                "local-nf" => {
                    let anchor = match (args.anchor, env.and_then(|e| e.fixed_start())) {
                        (Some(a), _) => NodeId(a),
                        (None, Some(s)) => s,
                        (None, None) => {
                            return Err(CliError::Usage(
                                "local-nf needs --anchor on a uniform-start environment".into(),
                            ))
                        }
                    };
                    PolicySpec::LocalNegativeFeedback { anchor }
                }
                "persistent" => PolicySpec::TemporallyPersistent(parse_pdist(&args.pdist)?),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown policy {other:?} (rw, nf, local-nf, persistent)"
                    )))
                }
            };
            if let Some(e) = env {
                spec.validate(&e.graph)?;
            }
            Ok(PolicyChoice::Graph(spec))
        }
    }
}
