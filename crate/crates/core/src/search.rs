//! Shared bookkeeping for the two augmenting-path engines.

use std::time::Instant;

use thiserror::Error;

/// Raised when a search crosses its deadline.
#[derive(Debug, Error)]
#[error("search deadline exceeded")]
pub struct SearchTimeout;

/// Expansion/generation counters plus an optional deadline, threaded through
/// one augmenting-path search. The deadline is only consulted every 1024
/// expansions so the check stays off the hot path.
pub struct SearchContext {
    pub expansions: u64,
    pub generated: u64,
    deadline: Option<Instant>,
}

impl SearchContext {
    pub fn new(deadline: Option<Instant>) -> Self {
        SearchContext {
            expansions: 0,
            generated: 0,
            deadline,
        }
    }

    /// Record one expansion; errs if the deadline has passed.
    #[inline]
    pub fn tick(&mut self) -> Result<(), SearchTimeout> {
        self.expansions += 1;
        if self.expansions & 1023 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(SearchTimeout);
                }
            }
        }
        Ok(())
    }
}
