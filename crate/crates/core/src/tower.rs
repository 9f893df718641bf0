//! The iteration `G_{n+1} = LatAut(G_n)` starting from a tower group.
//!
//! After one step every group in the sequence has the form `S_a × S_b`
//! (with `S_0 = S_1 = 1` and `S_2 = C_2`), so a node is either the starting
//! spec or such a pair.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::autgroup::{brute_force_automorphisms, order_histogram, AutError};
use crate::group_spec::{factorial, TowerGroupSpec};
use crate::lattice::Lattice;
use crate::perm_oracle::{concrete_lattice, product_order_histogram, ConcreteGroup, OracleError};
use crate::poset::AbstractLattice;

/// Hard cap on the number of steps taken by [`run_tower`].
pub const MAX_STEPS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("tower from {start} did not reach the trivial group within {steps} steps")]
    NonTermination { start: String, steps: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerNode {
    Start(TowerGroupSpec),
    /// `S_a × S_b`; `a` counts factors of degree 4, `b` the others.
    Pair {
        a: u32,
        b: u32,
    },
}

impl TowerNode {
    pub fn pair(a: u32, b: u32) -> Self {
        TowerNode::Pair { a, b }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            TowerNode::Start(spec) => spec.is_trivial(),
            TowerNode::Pair { a, b } => *a <= 1 && *b <= 1,
        }
    }

    /// Degrees of the nontrivial factors, largest first.
    pub fn factor_degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = match self {
            TowerNode::Start(spec) => spec.degrees(),
            TowerNode::Pair { a, b } => vec![*a, *b],
        };
        d.retain(|&k| k >= 2);
        d.sort_unstable_by(|x, y| y.cmp(x));
        d
    }

    /// `|G|`, saturating at `u128::MAX`.
    pub fn group_order(&self) -> u128 {
        self.factor_degrees()
            .iter()
            .fold(1u128, |acc, &k| acc.saturating_mul(factorial(k.min(34))))
    }
}

impl fmt::Display for TowerNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let TowerNode::Start(spec) = self {
            return write!(f, "{spec}");
        }
        let name = |k: u32| {
            if k == 2 {
                "C2".to_string()
            } else {
                format!("S{k}")
            }
        };
        match self.factor_degrees()[..] {
            [] => f.write_str("1"),
            [n] => f.write_str(&name(n)),
            [n, m] if n == m => write!(f, "{}^2", name(n)),
            [n, 2] => write!(f, "C2*S{n}"),
            [n, m] => write!(f, "S{n}*S{m}"),
            _ => unreachable!("pairs have at most two factors"),
        }
    }
}

/// One step of the tower.
///
/// A starting spec goes to `S_{a_4} × S_B`. A pair is dispatched on the
/// multiset of its nontrivial factor degrees, which determines the group up
/// to isomorphism.
pub fn latauto_step(node: &TowerNode) -> TowerNode {
    if let TowerNode::Start(spec) = node {
        return TowerNode::pair(spec.a4() as u32, spec.b() as u32);
    }
    let is4 = |k: u32| u32::from(k == 4);
    match node.factor_degrees()[..] {
        // At most one nontrivial factor: the lattice is a chain.
        [] | [_] => TowerNode::pair(0, 0),
        // C_2^2: the diamond, whose automorphisms form S_3.
        [2, 2] => TowerNode::pair(0, 3),
        // C_2 × S_m: the swap of the two outer coatoms.
        [_, 2] => TowerNode::pair(0, 2),
        // S_n × S_m is a tower group.
        [n, m] => TowerNode::pair(is4(n) + is4(m), 2 - is4(n) - is4(m)),
        _ => unreachable!("pairs have at most two factors"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerRun {
    pub nodes: Vec<TowerNode>,
}

impl TowerRun {
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn last(&self) -> &TowerNode {
        self.nodes.last().expect("a run has a starting node")
    }

    /// Three steps, the most any tower group needs.
    pub fn is_sharp(&self) -> bool {
        self.steps() == 3
    }

    /// `G_0 = S4^2*S3^2 → G_1 = C2^2 → G_2 = S3 → G_3 = 1 (3 steps, sharp)`.
    pub fn format_line(&self) -> String {
        let chain: Vec<String> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| format!("G_{i} = {n}"))
            .collect();
        let steps = self.steps();
        let unit = if steps == 1 { "step" } else { "steps" };
        let sharp = if self.is_sharp() { ", sharp" } else { "" };
        format!("{} ({steps} {unit}{sharp})", chain.join(" → "))
    }
}

impl Serialize for TowerRun {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            nodes: Vec<String>,
            steps: usize,
            sharp: bool,
        }
        Repr {
            nodes: self.nodes.iter().map(ToString::to_string).collect(),
            steps: self.steps(),
            sharp: self.is_sharp(),
        }
        .serialize(serializer)
    }
}

/// Iterates [`latauto_step`] until the trivial group.
pub fn run_tower(start: TowerNode) -> Result<TowerRun, TowerError> {
    let limit = if matches!(start, TowerNode::Start(_)) {
        3
    } else {
        MAX_STEPS
    };
    let name = start.to_string();
    let mut nodes = vec![start];
    while !nodes.last().expect("nonempty").is_trivial() {
        if nodes.len() > limit {
            return Err(TowerError::NonTermination {
                start: name,
                steps: nodes.len() - 1,
            });
        }
        let next = latauto_step(nodes.last().expect("nonempty"));
        nodes.push(next);
    }
    Ok(TowerRun { nodes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepStatus {
    Match,
    Mismatch,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub node: String,
    pub predicted: String,
    pub predicted_order: u128,
    pub brute_force_order: Option<usize>,
    /// Element-order histograms of the brute-force group and of the prediction.
    pub histogram_matches: Option<bool>,
    pub lattice_size: Option<usize>,
    pub source: &'static str,
    pub status: StepStatus,
    pub note: Option<String>,
}

/// Compares [`latauto_step`] with a brute-force automorphism count on the
/// actual lattice of `node`, when that lattice is small enough to build.
pub fn verify_step_against_lattice(
    node: &TowerNode,
    max_slots: usize,
    max_order: u128,
    max_lattice: usize,
) -> StepReport {
    let predicted = latauto_step(node);
    let mut report = StepReport {
        node: node.to_string(),
        predicted: predicted.to_string(),
        predicted_order: predicted.group_order(),
        brute_force_order: None,
        histogram_matches: None,
        lattice_size: None,
        source: "lattice",
        status: StepStatus::Skipped,
        note: None,
    };
    let degrees = node.factor_degrees();
    let lattice: Result<AbstractLattice, String> = if degrees.contains(&2) {
        report.source = "oracle";
        ConcreteGroup::new(&degrees, max_order)
            .map(|g| concrete_lattice(&g.all_normal_subgroups()))
            .map_err(|e: OracleError| e.to_string())
    } else {
        TowerGroupSpec::from_degrees(&degrees)
            .map_err(|e| e.to_string())
            .and_then(|spec| {
                Lattice::enumerate_bounded(&spec, max_slots).map_err(|e| e.to_string())
            })
            .map(|l| l.to_abstract())
    };
    let lattice = match lattice {
        Ok(l) => l,
        Err(e) => {
            report.note = Some(e);
            return report;
        }
    };
    report.lattice_size = Some(lattice.len());
    let group = match brute_force_automorphisms(&lattice, max_lattice) {
        Ok(g) => g,
        Err(e @ AutError::TooLarge { .. }) => {
            report.note = Some(e.to_string());
            return report;
        }
        Err(e) => {
            report.status = StepStatus::Mismatch;
            report.note = Some(e.to_string());
            return report;
        }
    };
    report.brute_force_order = Some(group.len());
    let predicted_hist: BTreeMap<usize, usize> =
        product_order_histogram(&predicted.factor_degrees());
    let hist_ok = order_histogram(&group) == predicted_hist;
    report.histogram_matches = Some(hist_ok);
    report.status = if group.len() as u128 == report.predicted_order && hist_ok {
        StepStatus::Match
    } else {
        StepStatus::Mismatch
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn start(s: &str) -> TowerNode {
        TowerNode::Start(TowerGroupSpec::parse(s).unwrap())
    }

    #[test]
    fn sharp_example() {
        let run = run_tower(start("S4^2*S3^2")).unwrap();
        assert_eq!(
            run.nodes,
            vec![
                start("S4^2*S3^2"),
                TowerNode::pair(2, 2),
                TowerNode::pair(0, 3),
                TowerNode::pair(0, 0)
            ]
        );
        assert_eq!(
            run.format_line(),
            "G_0 = S4^2*S3^2 → G_1 = C2^2 → G_2 = S3 → G_3 = 1 (3 steps, sharp)"
        );
    }

    #[test]
    fn short_towers() {
        assert_eq!(
            run_tower(start("S3^3")).unwrap().format_line(),
            "G_0 = S3^3 → G_1 = S3 → G_2 = 1 (2 steps)"
        );
        assert_eq!(
            run_tower(start("1")).unwrap().format_line(),
            "G_0 = 1 (0 steps)"
        );
        assert_eq!(run_tower(start("S5")).unwrap().steps(), 1);
        assert_eq!(run_tower(start("S5^2*S3^2")).unwrap().steps(), 2);
        assert_eq!(run_tower(start("S4^3")).unwrap().steps(), 2);
    }

    #[test]
    fn pair_table() {
        let step = |a, b| latauto_step(&TowerNode::pair(a, b));
        assert_eq!(step(2, 2), TowerNode::pair(0, 3));
        assert_eq!(step(0, 3), TowerNode::pair(0, 0));
        assert_eq!(step(2, 3), TowerNode::pair(0, 2));
        assert_eq!(step(3, 2), TowerNode::pair(0, 2));
        assert_eq!(step(4, 5), TowerNode::pair(1, 1));
        assert_eq!(step(4, 4), TowerNode::pair(2, 0));
        assert_eq!(step(5, 6), TowerNode::pair(0, 2));
        assert_eq!(step(1, 2), TowerNode::pair(0, 0));
        for a in 0..=12 {
            for b in 0..=12 {
                assert!(run_tower(TowerNode::pair(a, b)).unwrap().steps() <= 3);
            }
        }
    }

    #[test]
    fn names() {
        assert_eq!(TowerNode::pair(2, 0).to_string(), "C2");
        assert_eq!(TowerNode::pair(3, 2).to_string(), "C2*S3");
        assert_eq!(TowerNode::pair(4, 5).to_string(), "S5*S4");
        assert_eq!(TowerNode::pair(3, 3).to_string(), "S3^2");
        assert_eq!(TowerNode::pair(1, 0).to_string(), "1");
    }

    #[test]
    fn steps_against_lattices() {
        for node in [
            TowerNode::pair(2, 2),
            TowerNode::pair(2, 3),
            TowerNode::pair(4, 5),
            start("S3^3"),
        ] {
            let r = verify_step_against_lattice(&node, 8, 5000, 2000);
            assert_eq!(r.status, StepStatus::Match, "{r:?}");
        }
        let r = verify_step_against_lattice(&TowerNode::pair(2, 2), 8, 5000, 2000);
        assert_eq!((r.brute_force_order, r.lattice_size), (Some(6), Some(5)));
        let r = verify_step_against_lattice(&TowerNode::pair(2, 7), 8, 5000, 2000);
        assert_eq!(r.status, StepStatus::Skipped);
    }
}
