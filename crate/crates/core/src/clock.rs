use std::time::{Duration, Instant};

/// Optional wall-clock deadline shared by the solvers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn after(limit: Option<Duration>) -> Self {
        Deadline(limit.and_then(|d| Instant::now().checked_add(d)))
    }

    pub(crate) fn none() -> Self {
        Deadline(None)
    }

    pub(crate) fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    /// The earlier of this deadline and `limit` from now.
    pub(crate) fn min_with(&self, limit: Option<Duration>) -> Self {
        let other = Deadline::after(limit);
        match (self.0, other.0) {
            (Some(a), Some(b)) => Deadline(Some(a.min(b))),
            (a, b) => Deadline(a.or(b)),
        }
    }
}
