use serde::Serialize;

use crate::env::EnvKind;
use crate::error::{Error, Result};
use crate::scalar::harmonic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    Exact,
    Asymptotic,
    UpperBound,
}

impl FormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FormKind::Exact => "exact",
            FormKind::Asymptotic => "asymptotic",
            FormKind::UpperBound => "upper-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    RandomWalk,
    NegativeFeedback,
}

/// Value of a family formula together with what kind of statement it is.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub kind: FormKind,
    pub value: f64,
    pub description: &'static str,
}

fn form(kind: FormKind, value: f64, description: &'static str) -> ClosedForm {
    ClosedForm {
        kind,
        value,
        description,
    }
}

/// Expected cover time (or a bound on it) for the families with known
/// formulas. Star, path and circle values use the step-index convention.
pub fn closed_form(env: &EnvKind, policy: PolicyKind) -> Result<ClosedForm> {
    use FormKind::*;
    use PolicyKind::*;
    let out = match (env, policy) {
        (EnvKind::Star { n }, NegativeFeedback) => form(Exact, (2 * n - 1) as f64, "2n - 1"),
        (EnvKind::Star { n }, RandomWalk) => form(
            Exact,
            2.0 * *n as f64 * harmonic::<f64>(*n) - 1.0,
            "2n H_n - 1",
        ),
        (EnvKind::Path { n }, RandomWalk) => form(Exact, (n * n) as f64, "n^2"),
        (EnvKind::Path { n }, NegativeFeedback) => form(UpperBound, (n * n) as f64, "n^2"),
        (EnvKind::Circle { n }, RandomWalk) => {
            form(Exact, (n * (n + 1) / 2) as f64, "n (n + 1) / 2")
        }
        (EnvKind::Circle { n }, NegativeFeedback) => {
            form(UpperBound, (n * (n + 1) / 2) as f64, "n (n + 1) / 2")
        }
        (EnvKind::Clique { n }, RandomWalk) => form(
            Exact,
            1.0 + (n - 1) as f64 * harmonic::<f64>(n - 1),
            "1 + sum_{i=1}^{n-1} (n - 1) / (n - i)",
        ),
        (EnvKind::Clique { n }, NegativeFeedback) => form(
            UpperBound,
            1.0 + (n - 1) as f64 * harmonic::<f64>(n - 1),
            "1 + sum_{i=1}^{n-1} (n - 1) / (n - i)",
        ),
        (EnvKind::Btree { b, h }, RandomWalk) => {
            let (b, h) = (*b as f64, *h as f64);
            form(
                Asymptotic,
                2.0 * h * h * b.powf(h + 1.0) * b.ln() / (b - 1.0),
                "2 H^2 b^(H+1) ln b / (b - 1)",
            )
        }
        (EnvKind::Btree { b, h }, NegativeFeedback) => {
            let (bf, hf) = (*b as f64, *h as f64);
            form(
                UpperBound,
                4.0 * hf * (bf + 1.0) / (bf - 1.0) * bf.powi(*h as i32),
                "4 H (b + 1) / (b - 1) b^H",
            )
        }
        (other, _) => {
            return Err(Error::Unsupported(format!(
                "no closed form for {}",
                other.name()
            )));
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::hitting_times_rw;
    use crate::graph::NodeId;
    use crate::Exact;

    #[test]
    fn star_values() {
        let nf = closed_form(&EnvKind::Star { n: 10 }, PolicyKind::NegativeFeedback).unwrap();
        assert_eq!((nf.kind, nf.value), (FormKind::Exact, 19.0));
        let rw = closed_form(&EnvKind::Star { n: 10 }, PolicyKind::RandomWalk).unwrap();
        assert!((rw.value - 57.579_365_079_365).abs() < 1e-9);
    }

    #[test]
    fn clique_value() {
        let c = closed_form(&EnvKind::Clique { n: 10 }, PolicyKind::RandomWalk).unwrap();
        assert!((c.value - 26.460_714_285_714).abs() < 1e-9);
    }

    #[test]
    fn circle_and_tree() {
        assert_eq!(
            closed_form(&EnvKind::Circle { n: 10 }, PolicyKind::RandomWalk)
                .unwrap()
                .value,
            55.0
        );
        let t = closed_form(&EnvKind::Btree { b: 2, h: 6 }, PolicyKind::NegativeFeedback).unwrap();
        assert_eq!((t.kind, t.value), (FormKind::UpperBound, 4608.0));
        let a = closed_form(&EnvKind::Btree { b: 2, h: 6 }, PolicyKind::RandomWalk).unwrap();
        assert_eq!(a.kind, FormKind::Asymptotic);
        assert!((a.value - 6388.0).abs() < 0.1);
    }

    #[test]
    fn path_matches_linear_solve() {
        for n in 2..=50 {
            let g = crate::env::make_path(n).unwrap().graph;
            let h = hitting_times_rw::<Exact>(&g, NodeId(n)).unwrap();
            let c = closed_form(&EnvKind::Path { n }, PolicyKind::RandomWalk).unwrap();
            assert_eq!(Exact::from_float(c.value).unwrap(), h[0]);
        }
    }

    #[test]
    fn unsupported_family() {
        let err = closed_form(&EnvKind::Hanoi { discs: 3 }, PolicyKind::RandomWalk).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
