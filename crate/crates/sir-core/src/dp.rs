//! Exact optimal-SIR solver: weighted interval scheduling by dynamic
//! programming, plus a branch-and-bound enumeration oracle for testing.
//!
//! The DP never materializes an N x N weight matrix; interval weights are
//! read off the measure engine on demand, keeping memory at O(N).

use crate::measures::MeasureEngine;
use crate::types::{Interval, SirResult};

/// Instrumented work counters, machine-independent by construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Candidate-interval evaluations inside DP inner loops.
    pub dp_evals: u64,
    /// Range queries issued by the weakness scans (zero for plain DP).
    pub scan_evals: u64,
    /// Number of sub-problems solved (1 for plain DP).
    pub segments: usize,
}

impl SolveStats {
    pub fn total_ops(&self) -> u64 {
        self.dp_evals + self.scan_evals
    }
}

/// Solve the sub-problem restricted to global timestamps `[lo,hi]`.
/// Returns the selected intervals (global coordinates, sorted) and their
/// sum-length.
pub(crate) fn solve_dp_range(
    engine: &MeasureEngine,
    tau: f64,
    l_min: usize,
    lo: usize,
    hi: usize,
    stats: &mut SolveStats,
) -> (Vec<Interval>, usize) {
    let len = hi - lo + 1;
    // sl[i]: best sum-length over [lo, lo+i-1]; non-decreasing, sl[i] <= i.
    let mut sl = vec![0usize; len + 1];
    // choice[i]: 0 inherits from i-1, k >= 1 appends the interval [k,i]
    // (local coordinates).
    let mut choice = vec![0usize; len + 1];
    for i in 1..=len {
        let mut best = sl[i - 1];
        let mut pick = 0usize;
        // Only intervals of length >= l_min can carry weight.
        let k_max = (i + 1).saturating_sub(l_min);
        for k in 1..=k_max {
            stats.dp_evals += 1;
            let iv = Interval::new(lo + k - 1, lo + i - 1);
            if engine.is_strong(iv, tau) {
                let cand = (i - k + 1) + sl[k - 1];
                // Strict improvement only: ties inherit the previous set,
                // and among maximizing k the smallest (longest interval)
                // wins because it is seen first.
                if cand > best {
                    best = cand;
                    pick = k;
                }
            }
        }
        sl[i] = best;
        choice[i] = pick;
        debug_assert!(sl[i] >= sl[i - 1], "sum-lengths must be non-decreasing");
        debug_assert!(sl[i] <= i, "cannot cover more than i timestamps");
    }

    let mut intervals = Vec::new();
    let mut i = len;
    while i > 0 {
        let k = choice[i];
        if k == 0 {
            i -= 1;
        } else {
            intervals.push(Interval::new(lo + k - 1, lo + i - 1));
            i = k - 1;
        }
    }
    intervals.reverse();
    (intervals, sl[len])
}

fn assemble(engine: &MeasureEngine, intervals: Vec<Interval>, sum_length: usize) -> SirResult {
    let strengths = intervals.iter().map(|&iv| engine.rel(iv)).collect();
    let (a, b) = engine.pair();
    SirResult {
        pair: (a.to_string(), b.to_string()),
        intervals,
        sum_length,
        strengths,
    }
}

/// Find the maximum-sum-length set of disjoint intervals that are each
/// strong under `tau` and at least `l_min` long. Deterministic: ties prefer
/// the inherited set, then the longest final interval.
pub fn solve_dp(engine: &MeasureEngine, tau: f64, l_min: usize) -> SirResult {
    solve_dp_with_stats(engine, tau, l_min).0
}

/// As [`solve_dp`], also returning instrumented operation counts.
pub fn solve_dp_with_stats(engine: &MeasureEngine, tau: f64, l_min: usize) -> (SirResult, SolveStats) {
    assert!(l_min >= 1, "l_min must be at least 1");
    let mut stats = SolveStats {
        segments: 1,
        ..SolveStats::default()
    };
    let (intervals, sum_length) = solve_dp_range(engine, tau, l_min, 1, engine.n(), &mut stats);
    (assemble(engine, intervals, sum_length), stats)
}

/// Test oracle: enumerate every set of pairwise-disjoint qualifying
/// intervals (with a sound sum-length bound to skip dominated branches) and
/// return one with maximum sum-length.
///
/// Panics for N > 20; the search is exponential.
pub fn solve_exhaustive(engine: &MeasureEngine, tau: f64, l_min: usize) -> SirResult {
    assert!(l_min >= 1, "l_min must be at least 1");
    let n = engine.n();
    assert!(n <= 20, "exhaustive search is limited to N <= 20, got {n}");

    struct Search<'a> {
        engine: &'a MeasureEngine,
        tau: f64,
        l_min: usize,
        n: usize,
        best: usize,
        best_set: Vec<Interval>,
        current: Vec<Interval>,
        current_sum: usize,
    }

    impl Search<'_> {
        fn dfs(&mut self, t: usize) {
            if self.current_sum > self.best {
                self.best = self.current_sum;
                self.best_set = self.current.clone();
            }
            if t > self.n {
                return;
            }
            // Even covering every remaining timestamp cannot beat the best.
            if self.current_sum + (self.n - t + 1) <= self.best {
                return;
            }
            self.dfs(t + 1);
            for e in t..=self.n {
                let iv = Interval::new(t, e);
                if iv.len() >= self.l_min && self.engine.is_strong(iv, self.tau) {
                    self.current.push(iv);
                    self.current_sum += iv.len();
                    self.dfs(e + 1);
                    self.current.pop();
                    self.current_sum -= iv.len();
                }
            }
        }
    }

    let mut search = Search {
        engine,
        tau,
        l_min,
        n,
        best: 0,
        best_set: Vec::new(),
        current: Vec::new(),
        current_sum: 0,
    };
    search.dfs(1);
    let sum = search.best;
    assemble(engine, search.best_set, sum)
}
