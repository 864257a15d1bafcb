use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// Oracle query counters shared by a body (or potential) and everything
/// derived from it. Counters only ever grow; use [`QueryLedger::snapshot`]
/// deltas to attribute work to a phase.
#[derive(Debug, Default)]
pub struct QueryLedger {
    membership: AtomicU64,
    evaluation: AtomicU64,
    rejection_trials: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub membership_queries: u64,
    pub evaluation_queries: u64,
    pub rejection_trials: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn record_membership(&self) {
        self.membership.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn record_evaluation(&self) {
        self.evaluation.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn record_trials(&self, n: u64) {
        self.rejection_trials.fetch_add(n, Ordering::Relaxed);
    }

    pub fn membership_queries(&self) -> u64 {
        self.membership.load(Ordering::Relaxed)
    }

    pub fn evaluation_queries(&self) -> u64 {
        self.evaluation.load(Ordering::Relaxed)
    }

    pub fn rejection_trials(&self) -> u64 {
        self.rejection_trials.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            membership_queries: self.membership_queries(),
            evaluation_queries: self.evaluation_queries(),
            rejection_trials: self.rejection_trials(),
        }
    }
}

impl LedgerSnapshot {
    /// Counts accumulated since `earlier`.
    pub fn since(&self, earlier: &LedgerSnapshot) -> LedgerSnapshot {
        LedgerSnapshot {
            membership_queries: self.membership_queries - earlier.membership_queries,
            evaluation_queries: self.evaluation_queries - earlier.evaluation_queries,
            rejection_trials: self.rejection_trials - earlier.rejection_trials,
        }
    }

    pub fn add(&self, other: &LedgerSnapshot) -> LedgerSnapshot {
        LedgerSnapshot {
            membership_queries: self.membership_queries + other.membership_queries,
            evaluation_queries: self.evaluation_queries + other.evaluation_queries,
            rejection_trials: self.rejection_trials + other.rejection_trials,
        }
    }
}
