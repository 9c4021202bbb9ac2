use super::{ClusterConfig, Round, RoundKind, Transcript};
use crate::oprims::counters::OpCounts;
use crate::padding::PaddingPlan;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A closed-form cost bound evaluated on one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub formula: String,
    pub bound: f64,
    pub measured: f64,
    pub ok: bool,
}

impl BoundCheck {
    /// `measured ≤ bound`.
    pub fn at_most(name: &str, formula: &str, bound: f64, measured: f64) -> Self {
        BoundCheck {
            name: name.into(),
            formula: formula.into(),
            bound,
            measured,
            ok: measured <= bound + 1e-9,
        }
    }

    /// `measured = bound`.
    pub fn exactly(name: &str, formula: &str, bound: f64, measured: f64) -> Self {
        BoundCheck {
            name: name.into(),
            formula: formula.into(),
            bound,
            measured,
            ok: (measured - bound).abs() < 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub index: usize,
    pub label: String,
    pub kind: RoundKind,
    pub matrix: Vec<Vec<usize>>,
    pub elements: u64,
    pub nominal: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plan: Option<PaddingPlan>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub comm_elements: u64,
    pub comm_bytes: u64,
    /// Part of `comm_elements` counted by the textbook formulas.
    pub comm_nominal: u64,
    pub rounds: usize,
}

/// Sizes and skew of a join instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n1: u64,
    pub n2: u64,
    /// Join output size.
    pub m: u64,
    pub alpha1: u64,
    pub alpha2: u64,
    /// `α1 · α2 / M`, 0 for an empty join.
    pub phi: f64,
}

impl DatasetStats {
    pub fn from_keys(left: &[u64], right: &[u64]) -> Self {
        let count = |keys: &[u64]| {
            let mut h: HashMap<u64, u64> = HashMap::new();
            for &k in keys {
                *h.entry(k).or_default() += 1;
            }
            h
        };
        let (l, r) = (count(left), count(right));
        let m: u64 = l.iter().map(|(k, d)| d * r.get(k).copied().unwrap_or(0)).sum();
        let alpha1 = l.values().copied().max().unwrap_or(0);
        let alpha2 = r.values().copied().max().unwrap_or(0);
        DatasetStats {
            n1: left.len() as u64,
            n2: right.len() as u64,
            m,
            alpha1,
            alpha2,
            phi: if m == 0 { 0.0 } else { (alpha1 * alpha2) as f64 / m as f64 },
        }
    }
}

/// The JSON cost ledger of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub config: ClusterConfig,
    pub rounds: Vec<RoundReport>,
    pub totals: Totals,
    pub op_counters: Vec<OpCounts>,
    pub bound_formulas: Vec<BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dataset: Option<DatasetStats>,
}

impl CostReport {
    pub fn new(
        config: &ClusterConfig,
        transcript: &Transcript,
        counters: &[OpCounts],
        bound_formulas: Vec<BoundCheck>,
    ) -> Self {
        let rounds: Vec<RoundReport> = transcript.rounds.iter().map(round_report).collect();
        let comm_elements = rounds.iter().map(|r| r.elements).sum();
        CostReport {
            config: config.clone(),
            totals: Totals {
                comm_elements,
                comm_bytes: comm_elements * config.element_width as u64,
                comm_nominal: rounds.iter().map(|r| r.nominal).sum(),
                rounds: rounds.len(),
            },
            rounds,
            op_counters: counters.to_vec(),
            bound_formulas,
            dataset: None,
        }
    }

    pub fn all_bounds_ok(&self) -> bool {
        self.bound_formulas.iter().all(|b| b.ok)
    }
}

fn round_report(r: &Round) -> RoundReport {
    RoundReport {
        index: r.index,
        label: r.label.clone(),
        kind: r.kind,
        matrix: r.sizes.clone(),
        elements: r.elements(),
        nominal: r.nominal,
        plan: r.plan.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_small_join() {
        let s = DatasetStats::from_keys(&[1, 1, 2], &[1, 2, 2, 3]);
        assert_eq!((s.n1, s.n2, s.m, s.alpha1, s.alpha2), (3, 4, 4, 2, 2));
        assert!((s.phi - 1.0).abs() < 1e-12);
    }
}
