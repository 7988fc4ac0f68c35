//! Incremental slope envelopes for the window feasibility test.
//!
//! A trailing window of samples admits a line that stays within `delta`
//! of every point exactly when the tightest pairwise slope bounds do not
//! cross: for every pair with `t_i > t_j` the line's slope must lie in
//! `[(x_i - x_j - 2*delta)/(t_i - t_j), (x_i - x_j + 2*delta)/(t_i - t_j)]`,
//! so the window is feasible iff the largest lower bound does not exceed
//! the smallest upper bound.
//!
//! Tracking every pair from scratch costs O(R^2) per sample. Instead the
//! bounds are grouped by the older sample of each pair: entry `k` (1-based
//! from the newest sample) aggregates all pairs whose older member sits
//! `k` positions back. Appending a sample then touches each entry once,
//! and dropping the oldest sample just truncates the vectors.

use crate::sample::Sample;

/// Per-depth slope bounds for a trailing sample window.
///
/// `lower()[k-1]` is the largest value of `(x_i - x_j - 2*delta)/(t_i - t_j)`
/// over pairs whose older sample `j` sits `k` positions behind the newest,
/// `upper()[k-1]` the smallest value with `+2*delta`. The window itself is
/// owned by the caller; this type only maintains the bounds.
#[derive(Debug, Clone)]
pub struct SlopeEnvelopes {
    lower: Vec<f64>,
    upper: Vec<f64>,
    two_delta: f64,
}

impl SlopeEnvelopes {
    /// `delta` is the approximation band half-width, `capacity` the largest
    /// window size R the caller will ever hold (bounds storage up front so
    /// updates never allocate).
    pub fn new(delta: f64, capacity: usize) -> Self {
        assert!(
            delta.is_finite() && delta > 0.0,
            "delta must be positive and finite"
        );
        assert!(capacity > 0, "capacity must be positive");
        SlopeEnvelopes {
            lower: Vec::with_capacity(capacity),
            upper: Vec::with_capacity(capacity),
            two_delta: 2.0 * delta,
        }
    }

    /// Number of entries, equal to the window size R (window of R+1 samples).
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Aggregate bounds (m, M): the window admits a line within delta of
    /// every sample iff m <= M.
    pub fn aggregate(&self) -> (f64, f64) {
        debug_assert!(!self.is_empty());
        let m = self.lower.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let big_m = self.upper.iter().cloned().fold(f64::INFINITY, f64::min);
        (m, big_m)
    }

    /// Feasibility of the current window; the boundary case m == M counts
    /// as feasible (the band inequalities are non-strict).
    pub fn is_feasible(&self) -> bool {
        let (m, big_m) = self.aggregate();
        m <= big_m
    }

    /// Extend the window with sample `s` on the right.
    ///
    /// `window_newest_first` iterates the existing window samples from
    /// newest to oldest; every timestamp must precede `s.t`. Entries are
    /// updated in place: the new entry at depth k combines the old entry
    /// at depth k-1 with the pair (s, sample k back). Iterating fewer
    /// samples than the current length composes the append with dropping
    /// the oldest sample, which is how a caller holds a size cap.
    pub fn add_right<I>(&mut self, s: Sample, window_newest_first: I)
    where
        I: IntoIterator<Item = Sample>,
    {
        let mut saved_lo = f64::NAN;
        let mut saved_hi = f64::NAN;
        let mut count = 0usize;
        for (idx, older) in window_newest_first.into_iter().enumerate() {
            let dt = s.t - older.t;
            debug_assert!(dt > 0.0, "samples must be older than the appended one");
            let dx = s.x - older.x;
            let lo_pair = (dx - self.two_delta) / dt;
            let hi_pair = (dx + self.two_delta) / dt;
            let (lo_new, hi_new) = if idx == 0 {
                (lo_pair, hi_pair)
            } else {
                (saved_lo.max(lo_pair), saved_hi.min(hi_pair))
            };
            if idx < self.lower.len() {
                saved_lo = self.lower[idx];
                saved_hi = self.upper[idx];
                self.lower[idx] = lo_new;
                self.upper[idx] = hi_new;
            } else {
                self.lower.push(lo_new);
                self.upper.push(hi_new);
            }
            count = idx + 1;
        }
        // Entries beyond the iterated depth pair the new sample with
        // samples the caller no longer holds; they must not survive.
        self.lower.truncate(count);
        self.upper.truncate(count);
    }

    /// Drop the oldest window sample: its pairs are exactly the deepest
    /// entry, so the vectors shrink by one.
    pub fn remove_left(&mut self) {
        assert!(self.len() >= 2, "window must keep at least one entry");
        self.lower.pop();
        self.upper.pop();
    }
}
