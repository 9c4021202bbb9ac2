//! Per-thread operation counters for the computation-cost ledger.

use serde::{Deserialize, Serialize};
use std::cell::Cell;

thread_local! {
    static COMPARISONS: Cell<u64> = const { Cell::new(0) };
    static CMOVES: Cell<u64> = const { Cell::new(0) };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub comparisons: u64,
    pub cmoves: u64,
}

impl OpCounts {
    pub fn since(self, earlier: OpCounts) -> OpCounts {
        OpCounts {
            comparisons: self.comparisons - earlier.comparisons,
            cmoves: self.cmoves - earlier.cmoves,
        }
    }

    pub fn add(&mut self, other: OpCounts) {
        self.comparisons += other.comparisons;
        self.cmoves += other.cmoves;
    }
}

#[inline]
pub(crate) fn comparison() {
    COMPARISONS.with(|c| c.set(c.get() + 1));
}

#[inline]
pub(crate) fn cmove() {
    CMOVES.with(|c| c.set(c.get() + 1));
}

/// Monotone totals for the current thread.
pub fn snapshot() -> OpCounts {
    OpCounts {
        comparisons: COMPARISONS.with(Cell::get),
        cmoves: CMOVES.with(Cell::get),
    }
}
