use crate::padding::PaddingPlan;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    /// Sizes fixed by a padding plan.
    Padded,
    /// Sizes drawn from a seeded random assignment.
    Random,
    /// Sizes fixed by public sizes alone (sorting, scans, size broadcasts).
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub index: usize,
    pub label: String,
    pub kind: RoundKind,
    /// `sizes[i][j]`: elements sent from server `i` to server `j`.
    pub sizes: Vec<Vec<usize>>,
    /// Elements the round would move under the textbook accounting
    /// (real payload only, no padding); used to split off bookkeeping.
    pub nominal: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plan: Option<PaddingPlan>,
}

impl Round {
    pub fn elements(&self) -> u64 {
        self.sizes.iter().flatten().map(|&s| s as u64).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub round: usize,
    pub sender: usize,
    pub receiver: usize,
    pub elements: u64,
    pub bytes: u64,
}

/// First point where two transcripts disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    /// Position in the `(round, sender, receiver)` ordered entry list.
    pub entry: usize,
    pub left: Option<TranscriptEntry>,
    pub right: Option<TranscriptEntry>,
}

/// The observable sizes of every exchange, in round order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub servers: usize,
    pub element_width: usize,
    pub rounds: Vec<Round>,
}

impl Transcript {
    pub fn new(servers: usize, element_width: usize) -> Self {
        Transcript {
            servers,
            element_width,
            rounds: Vec::new(),
        }
    }

    pub fn push(&mut self, round: Round) {
        self.rounds.push(round);
    }

    /// All entries ordered by `(round, sender, receiver)`.
    pub fn entries(&self) -> Vec<TranscriptEntry> {
        let w = self.element_width as u64;
        let mut out = Vec::new();
        for (k, r) in self.rounds.iter().enumerate() {
            for (i, row) in r.sizes.iter().enumerate() {
                for (j, &s) in row.iter().enumerate() {
                    out.push(TranscriptEntry {
                        round: k,
                        sender: i,
                        receiver: j,
                        elements: s as u64,
                        bytes: s as u64 * w,
                    });
                }
            }
        }
        out
    }

    pub fn comm_elements(&self) -> u64 {
        self.rounds.iter().map(Round::elements).sum()
    }

    pub fn comm_bytes(&self) -> u64 {
        self.comm_elements() * self.element_width as u64
    }

    pub fn nominal(&self) -> u64 {
        self.rounds.iter().map(|r| r.nominal).sum()
    }

    /// Elements moved by rounds whose label starts with `prefix`.
    pub fn elements_with_prefix(&self, prefix: &str) -> u64 {
        self.rounds
            .iter()
            .filter(|r| r.label.starts_with(prefix))
            .map(Round::elements)
            .sum()
    }

    /// Compares the observable part (the size entries) of two transcripts.
    pub fn first_divergence(&self, other: &Transcript) -> Option<Divergence> {
        let a = self.entries();
        let b = other.entries();
        for k in 0..a.len().max(b.len()) {
            let (x, y) = (a.get(k).copied(), b.get(k).copied());
            if x != y {
                return Some(Divergence {
                    entry: k,
                    left: x,
                    right: y,
                });
            }
        }
        None
    }

    /// Observable equality: same entries in the same order.
    pub fn same_sizes(&self, other: &Transcript) -> bool {
        self.first_divergence(other).is_none()
    }
}
