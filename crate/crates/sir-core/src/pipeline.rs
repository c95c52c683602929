//! Dataset-level orchestration: pick candidate pairs with weak full-length
//! correlation, drop redundant pairs, mine every survivor, and run the
//! collective analytics (anomalous intervals, associated SIR sets).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::map_ordered;
use crate::measures::MeasureEngine;
use crate::pdp::solve_pdp;
use crate::stats;
use crate::types::{MinerConfig, SirResult, TimeSeries};

/// An unordered pair of series whose full-length correlation is weak
/// enough for sub-interval structure to be interesting.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub id_a: String,
    pub id_b: String,
    pub full_corr: f64,
}

/// Pair-by-timestamp activity: a cell is set when the timestamp lies inside
/// one of that pair's selected intervals. Only pairs with nonempty SIRs get
/// a row, so row support equals the pair's sum-length.
#[derive(Debug, Clone)]
pub struct ActivityMatrix {
    pub n: usize,
    pub pairs: Vec<(String, String)>,
    pub rows: Vec<Vec<bool>>,
}

impl ActivityMatrix {
    pub fn from_results(results: &[SirResult], n: usize) -> Self {
        let mut pairs = Vec::new();
        let mut rows = Vec::new();
        for result in results {
            if result.is_empty() {
                continue;
            }
            let mut row = vec![false; n];
            for iv in &result.intervals {
                for t in iv.start()..=iv.end() {
                    row[t - 1] = true;
                }
            }
            pairs.push(result.pair.clone());
            rows.push(row);
        }
        Self { n, pairs, rows }
    }

    pub fn row_support(&self, row: usize) -> usize {
        self.rows[row].iter().filter(|&&b| b).count()
    }
}

/// A set of two or more pairs simultaneously active on at least
/// `min_support` shared timestamps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociatedSirSet {
    /// Member pairs, sorted lexicographically.
    pub pairs: Vec<(String, String)>,
    /// Timestamps at which every member is active.
    pub support: usize,
}

/// Whether to report only maximal frequent sets or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemsetMode {
    Maximal,
    All,
}

/// All unordered pairs with |full-length correlation| below the configured
/// bound, in lexicographic id order.
pub fn select_candidates(
    series: &[TimeSeries],
    config: &MinerConfig,
) -> Result<Vec<CandidatePair>> {
    if series.len() < 2 {
        return Err(Error::TooFewSeries { n: series.len() });
    }
    let n = series[0].len();
    for s in series {
        if s.len() != n {
            return Err(Error::LengthMismatch {
                a: series[0].id().to_string(),
                la: n,
                b: s.id().to_string(),
                lb: s.len(),
            });
        }
    }
    let mut order: Vec<usize> = (0..series.len()).collect();
    order.sort_by(|&i, &j| series[i].id().cmp(series[j].id()));

    let mut pairs = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            let corr = stats::pearson(series[i].values(), series[j].values());
            if !corr.is_finite() {
                let id = if stats::zscore_slice(series[i].values()).is_none() {
                    series[i].id()
                } else {
                    series[j].id()
                };
                return Err(Error::ZeroVariance { id: id.to_string() });
            }
            if corr.abs() < config.candidates.max_abs_full_corr {
                pairs.push(CandidatePair {
                    id_a: series[i].id().to_string(),
                    id_b: series[j].id().to_string(),
                    full_corr: corr,
                });
            }
        }
    }
    Ok(pairs)
}

/// Greedy redundancy filter in input order: keep a pair iff no already-kept
/// pair matches it, where a match means the better of the two endpoint
/// matchings (straight and crossed) has min full-length AP at or above the
/// threshold.
pub fn prune_redundant(
    pairs: &[CandidatePair],
    series: &[TimeSeries],
    threshold: f64,
) -> Result<Vec<CandidatePair>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidConfig(
            "redundancy threshold must be in [0,1]".into(),
        ));
    }
    let index: HashMap<&str, usize> = series
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id(), i))
        .collect();
    let lookup = |id: &str| -> Result<usize> {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSeries { id: id.to_string() })
    };

    // Full-length AP is symmetric; memoize on the ordered index pair.
    let mut ap_cache: HashMap<(usize, usize), f64> = HashMap::new();
    let mut ap = |i: usize, j: usize| -> f64 {
        let key = (i.min(j), i.max(j));
        *ap_cache.entry(key).or_insert_with(|| {
            let x = series[key.0].values();
            let y = series[key.1].values();
            let sum: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            sum / x.len() as f64
        })
    };

    let mut kept: Vec<CandidatePair> = Vec::new();
    let mut kept_idx: Vec<(usize, usize)> = Vec::new();
    for pair in pairs {
        let (x1, y1) = (lookup(&pair.id_a)?, lookup(&pair.id_b)?);
        let redundant = kept_idx.iter().any(|&(x2, y2)| {
            let straight = ap(x1, x2).min(ap(y1, y2));
            let crossed = ap(x1, y2).min(ap(y1, x2));
            straight.max(crossed) >= threshold
        });
        if !redundant {
            kept_idx.push((x1, y1));
            kept.push(pair.clone());
        }
    }
    Ok(kept)
}

/// Mine one SIR per candidate pair with the partitioned solver, in input
/// order. `workers` controls batch parallelism (0 = available parallelism);
/// output is identical for every worker count.
pub fn mine_all(
    pairs: &[CandidatePair],
    series: &[TimeSeries],
    config: &MinerConfig,
    workers: usize,
) -> Result<Vec<SirResult>> {
    config.validate()?;
    let index: HashMap<&str, usize> = series
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id(), i))
        .collect();
    for pair in pairs {
        for id in [&pair.id_a, &pair.id_b] {
            if !index.contains_key(id.as_str()) {
                return Err(Error::UnknownSeries { id: id.clone() });
            }
        }
    }
    let results: Vec<Result<SirResult>> = map_ordered(pairs, workers, |pair| {
        let x = &series[index[pair.id_a.as_str()]];
        let y = &series[index[pair.id_b.as_str()]];
        let engine = MeasureEngine::build(x, y, config.measure)?;
        Ok(solve_pdp(&engine, config.tau, config.l_min))
    });
    results.into_iter().collect()
}

/// Sliding-window activity score: for every start `s`, the fraction of
/// results whose SIR contains the whole window `[s, s+window_len-1]` inside
/// a single selected interval. Output has `n - window_len + 1` entries.
pub fn score_anomalous_intervals(
    results: &[SirResult],
    window_len: usize,
    n: usize,
) -> Result<Vec<f64>> {
    if window_len < 1 {
        return Err(Error::InvalidConfig("window length must be at least 1".into()));
    }
    if window_len > n {
        return Err(Error::WindowTooLong { window: window_len, n });
    }
    let num_windows = n - window_len + 1;
    let mut counts = vec![0usize; num_windows];
    for result in results {
        for iv in &result.intervals {
            if iv.len() < window_len {
                continue;
            }
            // Window [s, s+w-1] fits inside [a,b] for s in [a, b-w+1].
            let first = iv.start();
            let last = (iv.end() + 1 - window_len).min(num_windows);
            for s in first..=last {
                counts[s - 1] += 1;
            }
        }
    }
    if results.is_empty() {
        return Ok(vec![0.0; num_windows]);
    }
    let total = results.len() as f64;
    Ok(counts.iter().map(|&c| c as f64 / total).collect())
}

/// Frequent co-activity mining over the activity matrix: pairs are items,
/// timestamps are transactions. Returns sets of at least `min_set_size`
/// pairs simultaneously active on at least `min_support` timestamps,
/// maximal ones only unless `mode` says otherwise, sorted by support
/// descending then lexicographic ids.
pub fn find_associated_sirs(
    results: &[SirResult],
    n: usize,
    min_support: usize,
    min_set_size: usize,
    mode: ItemsetMode,
) -> Result<Vec<AssociatedSirSet>> {
    if min_support < 1 {
        return Err(Error::InvalidConfig("min_support must be at least 1".into()));
    }
    if min_set_size < 2 {
        return Err(Error::InvalidConfig("min_set_size must be at least 2".into()));
    }
    let matrix = ActivityMatrix::from_results(results, n);
    let num_items = matrix.pairs.len();

    let support_of = |items: &[usize]| -> usize {
        (0..matrix.n)
            .filter(|&t| items.iter().all(|&i| matrix.rows[i][t]))
            .count()
    };

    // Level-wise apriori over item indices; itemsets are kept sorted so the
    // prefix-join candidate generation stays canonical.
    let mut levels: Vec<Vec<(Vec<usize>, usize)>> = Vec::new();
    let singles: Vec<(Vec<usize>, usize)> = (0..num_items)
        .filter_map(|i| {
            let sup = matrix.row_support(i);
            (sup >= min_support).then(|| (vec![i], sup))
        })
        .collect();
    if singles.is_empty() {
        return Ok(Vec::new());
    }
    levels.push(singles);

    loop {
        let prev = levels.last().unwrap();
        let mut next: Vec<(Vec<usize>, usize)> = Vec::new();
        for (i, (a, _)) in prev.iter().enumerate() {
            for (b, _) in &prev[i + 1..] {
                if a[..a.len() - 1] != b[..b.len() - 1] {
                    continue;
                }
                let mut candidate = a.clone();
                candidate.push(*b.last().unwrap());
                // Anti-monotonicity prune: every (k-1)-subset must be frequent.
                let all_subsets_frequent = (0..candidate.len()).all(|skip| {
                    let sub: Vec<usize> = candidate
                        .iter()
                        .enumerate()
                        .filter(|&(idx, _)| idx != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    prev.iter().any(|(s, _)| *s == sub)
                });
                if !all_subsets_frequent {
                    continue;
                }
                let sup = support_of(&candidate);
                if sup >= min_support {
                    next.push((candidate, sup));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }

    let mut reported: Vec<AssociatedSirSet> = Vec::new();
    for (level, sets) in levels.iter().enumerate() {
        let size = level + 1;
        if size < min_set_size {
            continue;
        }
        for (items, sup) in sets {
            if mode == ItemsetMode::Maximal {
                // A frequent superset, if any exists, exists at the next level.
                let has_frequent_superset = levels.get(level + 1).is_some_and(|up| {
                    up.iter()
                        .any(|(bigger, _)| items.iter().all(|i| bigger.contains(i)))
                });
                if has_frequent_superset {
                    continue;
                }
            }
            let mut pairs: Vec<(String, String)> =
                items.iter().map(|&i| matrix.pairs[i].clone()).collect();
            pairs.sort();
            reported.push(AssociatedSirSet {
                pairs,
                support: *sup,
            });
        }
    }
    reported.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.pairs.cmp(&b.pairs)));
    Ok(reported)
}
