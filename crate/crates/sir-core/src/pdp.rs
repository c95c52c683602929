//! Partitioned dynamic programming: locate timestamps no strong interval
//! can cross, split there, solve each piece with the exact DP, and union
//! the per-segment optima. Produces the same sum-length as the plain DP on
//! every input, in close to linear time on data whose strong stretches are
//! short relative to N.
//!
//! A timestamp `t` satisfies left-weakness when no interval ending at `t-1`
//! is strong (vacuously true at `t = 1`), and right-weakness when no
//! interval starting at `t` is strong. Where both hold the problem can be
//! split between `t-1` and `t`: any interval straddling the boundary is the
//! merge of a weak left part and a weak right part, and the measure merge
//! bound keeps the union weak.

use crate::dp::{solve_dp_range, SolveStats};
use crate::measures::MeasureEngine;
use crate::types::{Interval, SirResult};

/// Left- and right-weakness flags per timestamp; index 0 holds timestamp 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeaknessMask {
    pub lw: Vec<bool>,
    pub rw: Vec<bool>,
}

/// Safe split points and the segments they induce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    /// Timestamps `t` with both weaknesses, `1 < t <= N`, ascending. A cut
    /// at `t` starts a new segment at `t`.
    pub cut_points: Vec<usize>,
    /// Disjoint, contiguous segments covering `[1,N]`.
    pub segments: Vec<Interval>,
}

/// Single forward scan computing an extended weak-prefix array over
/// `t = 1..=n+1`: entry `t` is true when every interval ending at `t-1` is
/// weak. Entry 1 is vacuously true; entry `n+1` reports on intervals ending
/// at `n`.
///
/// The scan walks streaks: while singletons stay weak each next timestamp
/// inherits weakness; once a singleton at `s` is strong, every `m` in
/// `(s, e]` fails (the prefix `[s, m-1]` is strong) until the growing
/// interval `[s,e]` first turns weak, at which point `e+1` is weak again
/// and the walk restarts there. Each timestamp is queried a bounded number
/// of times, so the whole scan is O(n).
fn scan_weak_ext(n: usize, mut strong: impl FnMut(usize, usize) -> bool) -> Vec<bool> {
    let mut ext = vec![false; n + 2];
    ext[1] = true;
    let mut t = 1usize;
    while t <= n {
        // Invariant: ext[t] is true.
        if !strong(t, t) {
            ext[t + 1] = true;
            t += 1;
            continue;
        }
        let s = t;
        let mut e = t;
        loop {
            e += 1;
            if e > n {
                // Streak ran off the end: [s,n] is strong, so entry n+1
                // stays false, as do all of (s, n].
                return ext;
            }
            if !strong(s, e) {
                ext[e + 1] = true;
                break;
            }
        }
        t = e + 1;
    }
    ext
}

fn scan_left_counted(engine: &MeasureEngine, tau: f64, evals: &mut u64) -> Vec<bool> {
    let n = engine.n();
    let mut ext = scan_weak_ext(n, |s, e| {
        *evals += 1;
        engine.is_strong(Interval::new(s, e), tau)
    });
    ext.truncate(n + 1);
    ext.remove(0);
    ext
}

fn scan_right_counted(engine: &MeasureEngine, tau: f64, evals: &mut u64) -> Vec<bool> {
    let n = engine.n();
    // Right-weakness at t is left-weakness at n+2-t on the index-reversed
    // series; the reversed query needs only index arithmetic.
    let ext = scan_weak_ext(n, |s, e| {
        *evals += 1;
        engine.is_strong(Interval::new(n + 1 - e, n + 1 - s), tau)
    });
    let mut rw = vec![false; n];
    for t in 1..=n {
        rw[t - 1] = ext[n + 2 - t];
    }
    rw
}

/// `lw[t]` (index `t-1`) is true iff no interval `[s, t-1]` is strong.
/// Single O(N) scan; only `tau` matters, never `l_min`, because partition
/// safety depends solely on strong intervals not being severed.
pub fn scan_left_weakness(engine: &MeasureEngine, tau: f64) -> Vec<bool> {
    let mut evals = 0u64;
    scan_left_counted(engine, tau, &mut evals)
}

/// `rw[t]` (index `t-1`) is true iff no interval `[t, e]` is strong.
pub fn scan_right_weakness(engine: &MeasureEngine, tau: f64) -> Vec<bool> {
    let mut evals = 0u64;
    scan_right_counted(engine, tau, &mut evals)
}

/// Both masks in one call.
pub fn weakness_mask(engine: &MeasureEngine, tau: f64) -> WeaknessMask {
    WeaknessMask {
        lw: scan_left_weakness(engine, tau),
        rw: scan_right_weakness(engine, tau),
    }
}

/// Combine the masks into cut points (`lw AND rw`, excluding `t = 1`) and
/// the maximal contiguous segments between consecutive cuts.
pub fn find_partition_points(lw: &[bool], rw: &[bool]) -> Partitioning {
    assert_eq!(lw.len(), rw.len(), "mask length mismatch");
    let n = lw.len();
    let cut_points: Vec<usize> = (2..=n).filter(|&t| lw[t - 1] && rw[t - 1]).collect();
    let mut starts = Vec::with_capacity(cut_points.len() + 1);
    starts.push(1);
    starts.extend_from_slice(&cut_points);
    let mut segments = Vec::with_capacity(starts.len());
    for (i, &start) in starts.iter().enumerate() {
        let end = if i + 1 < starts.len() {
            starts[i + 1] - 1
        } else {
            n
        };
        segments.push(Interval::new(start, end));
    }
    Partitioning {
        cut_points,
        segments,
    }
}

/// Partitioned solve: same optimum as [`crate::dp::solve_dp`] on every
/// input. With no cut points it degrades to a single full-range DP.
pub fn solve_pdp(engine: &MeasureEngine, tau: f64, l_min: usize) -> SirResult {
    solve_pdp_with_stats(engine, tau, l_min).0
}

/// As [`solve_pdp`], also returning instrumented operation counts.
pub fn solve_pdp_with_stats(
    engine: &MeasureEngine,
    tau: f64,
    l_min: usize,
) -> (SirResult, SolveStats) {
    assert!(l_min >= 1, "l_min must be at least 1");
    let mut stats = SolveStats::default();
    let lw = scan_left_counted(engine, tau, &mut stats.scan_evals);
    let rw = scan_right_counted(engine, tau, &mut stats.scan_evals);
    let partitioning = find_partition_points(&lw, &rw);
    stats.segments = partitioning.segments.len();

    let mut intervals = Vec::new();
    let mut sum_length = 0usize;
    for seg in &partitioning.segments {
        let (ivs, sl) = solve_dp_range(engine, tau, l_min, seg.start(), seg.end(), &mut stats);
        sum_length += sl;
        intervals.extend(ivs);
    }
    let strengths = intervals.iter().map(|&iv| engine.rel(iv)).collect();
    let (a, b) = engine.pair();
    let result = SirResult {
        pair: (a.to_string(), b.to_string()),
        intervals,
        sum_length,
        strengths,
    };
    (result, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::solve_dp;
    use crate::measures::MeasureKind;
    use crate::types::{validate_sir, MinerConfig, TimeSeries};
    use proptest::prelude::*;

    fn engine_from_products(products: &[f64]) -> MeasureEngine {
        let x = TimeSeries::new("x", products.to_vec()).unwrap();
        let y = TimeSeries::new("y", vec![1.0; products.len()]).unwrap();
        MeasureEngine::build(&x, &y, MeasureKind::Ap).unwrap()
    }

    /// O(N^2) reference implementations of the two weakness definitions.
    fn brute_lw(engine: &MeasureEngine, tau: f64) -> Vec<bool> {
        let n = engine.n();
        (1..=n)
            .map(|t| {
                (1..t).all(|s| !engine.is_strong(Interval::new(s, t - 1), tau))
            })
            .collect()
    }

    fn brute_rw(engine: &MeasureEngine, tau: f64) -> Vec<bool> {
        let n = engine.n();
        (1..=n)
            .map(|t| (t..=n).all(|e| !engine.is_strong(Interval::new(t, e), tau)))
            .collect()
    }

    #[test]
    fn all_weak_series_is_weak_everywhere() {
        let engine = engine_from_products(&[-5.0, -5.0, -5.0]);
        assert_eq!(scan_left_weakness(&engine, 1.0), vec![true; 3]);
        assert_eq!(scan_right_weakness(&engine, 1.0), vec![true; 3]);
    }

    #[test]
    fn two_strong_blocks_with_a_weak_valley() {
        let engine = engine_from_products(&[2.0, 2.0, -5.0, -5.0, 2.0, 2.0]);
        // lw[4] holds because [1,3],[2,3],[3,3] all average below 1; lw[5]
        // holds because every interval ending at 4 stays below 1 as well.
        assert_eq!(
            scan_left_weakness(&engine, 1.0),
            vec![true, false, false, true, true, false]
        );
        // rw[4] holds because [4,4],[4,5],[4,6] have means -5,-1.5,-1/3.
        assert_eq!(
            scan_right_weakness(&engine, 1.0),
            vec![false, false, true, true, false, false]
        );
        assert_eq!(brute_lw(&engine, 1.0), scan_left_weakness(&engine, 1.0));
        assert_eq!(brute_rw(&engine, 1.0), scan_right_weakness(&engine, 1.0));
    }

    #[test]
    fn single_timestamp_masks() {
        let engine = engine_from_products(&[2.0]);
        assert_eq!(scan_left_weakness(&engine, 1.0), vec![true]);
        // The lone timestamp starts a strong singleton, so right-weakness
        // fails there (and the brute-force definition agrees).
        assert_eq!(scan_right_weakness(&engine, 1.0), vec![false]);
        assert_eq!(brute_rw(&engine, 1.0), vec![false]);

        let weak = engine_from_products(&[0.0]);
        assert_eq!(scan_right_weakness(&weak, 1.0), vec![true]);
    }

    #[test]
    fn partition_at_the_valley() {
        let engine = engine_from_products(&[2.0, 2.0, -5.0, -5.0, 2.0, 2.0]);
        let mask = weakness_mask(&engine, 1.0);
        let partitioning = find_partition_points(&mask.lw, &mask.rw);
        assert_eq!(partitioning.cut_points, vec![4]);
        assert_eq!(
            partitioning.segments,
            vec![Interval::new(1, 3), Interval::new(4, 6)]
        );
    }

    #[test]
    fn all_weak_series_splits_into_singletons() {
        let engine = engine_from_products(&[-1.0; 5]);
        let mask = weakness_mask(&engine, 1.0);
        let partitioning = find_partition_points(&mask.lw, &mask.rw);
        assert_eq!(partitioning.cut_points, vec![2, 3, 4, 5]);
        assert_eq!(partitioning.segments.len(), 5);
        assert!(partitioning.segments.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn all_strong_series_never_splits() {
        let engine = engine_from_products(&[2.0; 5]);
        let mask = weakness_mask(&engine, 1.0);
        let partitioning = find_partition_points(&mask.lw, &mask.rw);
        assert!(partitioning.cut_points.is_empty());
        assert_eq!(partitioning.segments, vec![Interval::new(1, 5)]);
    }

    #[test]
    fn pdp_unions_per_segment_optima() {
        let engine = engine_from_products(&[2.0, 2.0, -5.0, -5.0, 2.0, 2.0]);
        let result = solve_pdp(&engine, 1.0, 2);
        assert_eq!(
            result.intervals,
            vec![Interval::new(1, 2), Interval::new(5, 6)]
        );
        assert_eq!(result.sum_length, 4);
        assert_eq!(solve_dp(&engine, 1.0, 2).sum_length, 4);
    }

    #[test]
    fn scan_touches_each_timestamp_a_bounded_number_of_times() {
        for n in [50usize, 100, 200, 400] {
            let products = pseudo_random_products(42, n);
            let engine = engine_from_products(&products);
            let mut evals = 0u64;
            scan_left_counted(&engine, 1.0, &mut evals);
            scan_right_counted(&engine, 1.0, &mut evals);
            assert!(
                evals <= 4 * n as u64 + 4,
                "scans issued {evals} queries for N={n}"
            );
        }
    }

    fn pseudo_random_products(seed: u64, n: usize) -> Vec<f64> {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).max(1);
        (0..n)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
            })
            .collect()
    }

    proptest! {
        #[test]
        fn scans_match_brute_force(seed in 0u64..3000, n in 1usize..60, tau in -2.0f64..2.0) {
            let engine = engine_from_products(&pseudo_random_products(seed, n));
            prop_assert_eq!(scan_left_weakness(&engine, tau), brute_lw(&engine, tau));
            prop_assert_eq!(scan_right_weakness(&engine, tau), brute_rw(&engine, tau));
        }

        #[test]
        fn no_strong_interval_crosses_a_cut(seed in 0u64..2000, n in 2usize..50, tau in -2.0f64..2.0) {
            let engine = engine_from_products(&pseudo_random_products(seed, n));
            let mask = weakness_mask(&engine, tau);
            let partitioning = find_partition_points(&mask.lw, &mask.rw);
            for &t in &partitioning.cut_points {
                for a in 1..t {
                    for b in t..=n {
                        prop_assert!(
                            !engine.is_strong(Interval::new(a, b), tau),
                            "strong interval [{},{}] crosses cut {}", a, b, t
                        );
                    }
                }
            }
        }

        #[test]
        fn pdp_matches_dp_exactly(seed in 0u64..3000, n in 1usize..120, tau in -2.0f64..2.0, l_min in 1usize..5) {
            let engine = engine_from_products(&pseudo_random_products(seed, n));
            let dp = solve_dp(&engine, tau, l_min);
            let pdp = solve_pdp(&engine, tau, l_min);
            prop_assert_eq!(dp.sum_length, pdp.sum_length);
            // The per-segment DPs see the same candidates as the global DP,
            // so the witness sets coincide as well.
            prop_assert_eq!(dp.intervals, pdp.intervals);
        }

        #[test]
        fn pdp_output_validates(seed in 0u64..2000, n in 1usize..80, tau in -2.0f64..2.0, l_min in 1usize..5) {
            let engine = engine_from_products(&pseudo_random_products(seed, n));
            let result = solve_pdp(&engine, tau, l_min);
            let config = MinerConfig { tau, l_min, ..MinerConfig::default() };
            prop_assert!(validate_sir(&result, &engine, &config).unwrap());
        }

        #[test]
        fn segments_tile_the_range(seed in 0u64..1000, n in 1usize..60, tau in -2.0f64..2.0) {
            let engine = engine_from_products(&pseudo_random_products(seed, n));
            let mask = weakness_mask(&engine, tau);
            let partitioning = find_partition_points(&mask.lw, &mask.rw);
            let mut expected_start = 1;
            for seg in &partitioning.segments {
                prop_assert_eq!(seg.start(), expected_start);
                expected_start = seg.end() + 1;
            }
            prop_assert_eq!(expected_start, n + 1);
        }
    }
}
