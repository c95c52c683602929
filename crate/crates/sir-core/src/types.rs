//! Domain types shared by every other module: series, intervals, mined
//! results, and the miner configuration.
//!
//! Timestamps are 1-based everywhere a user can see them, matching the
//! `[s,e]` convention of the record formats. Internal 0-based indexing never
//! leaks into serialized output.

use std::fmt;

use crate::error::{Error, Result};
use crate::measures::{MeasureEngine, MeasureKind};
use crate::stats::format_sig6;

/// A named, fixed-length sequence of real observations at regular timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Build a series, rejecting empty or non-finite input.
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if values.is_empty() {
            return Err(Error::EmptySeries { id });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { id, t: pos + 1 });
        }
        Ok(Self { id, values })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of timestamps N.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observation at 1-based timestamp `t`.
    pub fn at(&self, t: usize) -> f64 {
        self.values[t - 1]
    }
}

/// A closed 1-based timestamp range `[s,e]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    s: usize,
    e: usize,
}

impl Interval {
    /// Panics unless `1 <= s <= e`.
    pub fn new(s: usize, e: usize) -> Self {
        assert!(s >= 1 && s <= e, "invalid interval [{s},{e}]");
        Self { s, e }
    }

    pub fn start(&self) -> usize {
        self.s
    }

    pub fn end(&self) -> usize {
        self.e
    }

    /// Number of timestamps covered: `e - s + 1`. A singleton has length 1.
    pub fn len(&self) -> usize {
        self.e - self.s + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.s <= other.e && other.s <= self.e
    }

    /// True when `[s,e]` contains the whole of `other`.
    pub fn contains(&self, other: &Interval) -> bool {
        self.s <= other.s && other.e <= self.e
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.s, self.e)
    }
}

/// The optimal set of disjoint intervals mined for one pair, with its
/// sum-length and per-interval strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct SirResult {
    pub pair: (String, String),
    /// Pairwise disjoint, sorted by start ascending.
    pub intervals: Vec<Interval>,
    /// Total number of timestamps covered by `intervals`.
    pub sum_length: usize,
    /// Relationship strength of each interval, in the same order.
    pub strengths: Vec<f64>,
}

impl SirResult {
    /// An empty SIR is a valid result, not an error.
    pub fn empty(pair: (String, String)) -> Self {
        Self {
            pair,
            intervals: Vec::new(),
            sum_length: 0,
            strengths: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// One-line record: pair ids, `s-e` interval tokens, sum-length, and
    /// per-interval strengths at six significant digits. Tab-separated with
    /// comma-joined lists; `-` stands for an empty list.
    pub fn to_record(&self) -> String {
        let intervals = if self.intervals.is_empty() {
            "-".to_string()
        } else {
            self.intervals
                .iter()
                .map(Interval::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let strengths = if self.strengths.is_empty() {
            "-".to_string()
        } else {
            self.strengths
                .iter()
                .map(|&r| format_sig6(r))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.pair.0, self.pair.1, intervals, self.sum_length, strengths
        )
    }
}

/// Significance-test settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceConfig {
    /// Number of null randomizations M.
    pub num_randomizations: usize,
    pub rng_seed: u64,
    /// Replace the second series of the pair instead of the first.
    pub replace_second: bool,
}

impl Default for SignificanceConfig {
    fn default() -> Self {
        Self {
            num_randomizations: 1000,
            rng_seed: 0,
            replace_second: false,
        }
    }
}

/// Candidate-pair selection and redundancy-pruning thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateConfig {
    /// Keep pairs whose |full-length correlation| is below this bound.
    pub max_abs_full_corr: f64,
    /// Two pairs are redundant when their best endpoint matching has
    /// min full-length AP at or above this value.
    pub redundancy_threshold: f64,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        Self {
            max_abs_full_corr: 0.25,
            redundancy_threshold: 0.7,
        }
    }
}

/// Thresholds and measure choice for mining.
#[derive(Debug, Clone, PartialEq)]
pub struct MinerConfig {
    /// Strength threshold. Similarity measures require `rel >= tau`,
    /// distance measures `rel <= tau`.
    pub tau: f64,
    /// Minimum selectable interval length.
    pub l_min: usize,
    pub measure: MeasureKind,
    pub significance: SignificanceConfig,
    pub candidates: CandidateConfig,
}

impl Default for MinerConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            l_min: 6,
            measure: MeasureKind::Ap,
            significance: SignificanceConfig::default(),
            candidates: CandidateConfig::default(),
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.tau.is_finite() {
            return Err(Error::InvalidConfig("tau must be finite".into()));
        }
        if self.l_min < 1 {
            return Err(Error::InvalidConfig("l_min must be at least 1".into()));
        }
        if self.significance.num_randomizations < 1 {
            return Err(Error::InvalidConfig(
                "num_randomizations must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.candidates.max_abs_full_corr) {
            return Err(Error::InvalidConfig(
                "max_abs_full_corr must be in [0,1]".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.candidates.redundancy_threshold) {
            return Err(Error::InvalidConfig(
                "redundancy_threshold must be in [0,1]".into(),
            ));
        }
        Ok(())
    }
}

/// Check every `SirResult` invariant against the engine it was mined from:
/// intervals sorted and pairwise disjoint, each long enough and strong, and
/// the sum-length arithmetic consistent.
///
/// Returns a distinct error (rather than `false`) when an interval lies
/// outside `[1,N]` or the result names a different pair than the engine.
pub fn validate_sir(
    result: &SirResult,
    engine: &MeasureEngine,
    config: &MinerConfig,
) -> Result<bool> {
    let (ea, eb) = engine.pair();
    if result.pair.0 != ea || result.pair.1 != eb {
        return Err(Error::PairMismatch {
            ra: result.pair.0.clone(),
            rb: result.pair.1.clone(),
            ea: ea.to_string(),
            eb: eb.to_string(),
        });
    }
    let n = engine.n();
    for iv in &result.intervals {
        if iv.end() > n {
            return Err(Error::IntervalOutOfBounds {
                s: iv.start(),
                e: iv.end(),
                n,
            });
        }
    }
    // Sorted by start ascending.
    if result.intervals.windows(2).any(|w| w[0].start() > w[1].start()) {
        return Ok(false);
    }
    // Exhaustive pairwise disjointness.
    for (i, a) in result.intervals.iter().enumerate() {
        for b in &result.intervals[i + 1..] {
            if a.overlaps(b) {
                return Ok(false);
            }
        }
    }
    for iv in &result.intervals {
        if iv.len() < config.l_min || !engine.is_strong(*iv, config.tau) {
            return Ok(false);
        }
    }
    let total: usize = result.intervals.iter().map(Interval::len).sum();
    Ok(total == result.sum_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureEngine;

    fn engine_from_products(products: &[f64]) -> MeasureEngine {
        // AP kernel is x*y, so pairing the products with an all-ones series
        // yields exactly those per-timestamp kernel values.
        let x = TimeSeries::new("x", products.to_vec()).unwrap();
        let y = TimeSeries::new("y", vec![1.0; products.len()]).unwrap();
        MeasureEngine::build(&x, &y, MeasureKind::Ap).unwrap()
    }

    fn config(tau: f64, l_min: usize) -> MinerConfig {
        MinerConfig {
            tau,
            l_min,
            ..MinerConfig::default()
        }
    }

    #[test]
    fn series_rejects_empty_and_non_finite() {
        assert!(matches!(
            TimeSeries::new("a", vec![]),
            Err(Error::EmptySeries { .. })
        ));
        let err = TimeSeries::new("a", vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { t: 2, .. }));
    }

    #[test]
    fn interval_length_counts_timestamps() {
        assert_eq!(Interval::new(1, 6).len(), 6);
        assert_eq!(Interval::new(4, 4).len(), 1);
    }

    #[test]
    #[should_panic(expected = "invalid interval")]
    fn interval_rejects_reversed_bounds() {
        Interval::new(5, 4);
    }

    #[test]
    fn validate_accepts_a_consistent_result() {
        // rel[1,6] = 2.0 with all products 2.
        let engine = engine_from_products(&[2.0; 6]);
        let result = SirResult {
            pair: ("x".into(), "y".into()),
            intervals: vec![Interval::new(1, 6)],
            sum_length: 6,
            strengths: vec![2.0],
        };
        assert!(validate_sir(&result, &engine, &config(1.0, 6)).unwrap());
    }

    #[test]
    fn validate_rejects_overlap() {
        let engine = engine_from_products(&[2.0; 12]);
        let result = SirResult {
            pair: ("x".into(), "y".into()),
            intervals: vec![Interval::new(1, 6), Interval::new(4, 12)],
            sum_length: 15,
            strengths: vec![2.0, 2.0],
        };
        assert!(!validate_sir(&result, &engine, &config(1.0, 2)).unwrap());
    }

    #[test]
    fn validate_rejects_short_interval() {
        let engine = engine_from_products(&[2.0; 8]);
        let result = SirResult {
            pair: ("x".into(), "y".into()),
            intervals: vec![Interval::new(1, 5)],
            sum_length: 5,
            strengths: vec![2.0],
        };
        assert!(!validate_sir(&result, &engine, &config(1.0, 6)).unwrap());
    }

    #[test]
    fn validate_rejects_out_of_bounds_distinctly() {
        let engine = engine_from_products(&[2.0; 4]);
        let result = SirResult {
            pair: ("x".into(), "y".into()),
            intervals: vec![Interval::new(3, 9)],
            sum_length: 7,
            strengths: vec![2.0],
        };
        let err = validate_sir(&result, &engine, &config(1.0, 1)).unwrap_err();
        assert!(matches!(err, Error::IntervalOutOfBounds { e: 9, n: 4, .. }));
    }

    #[test]
    fn validate_rejects_pair_mismatch() {
        let engine = engine_from_products(&[2.0; 4]);
        let result = SirResult::empty(("p".into(), "q".into()));
        assert!(matches!(
            validate_sir(&result, &engine, &config(1.0, 1)),
            Err(Error::PairMismatch { .. })
        ));
    }

    #[test]
    fn empty_sir_is_valid() {
        let engine = engine_from_products(&[0.0; 4]);
        let result = SirResult::empty(("x".into(), "y".into()));
        assert!(validate_sir(&result, &engine, &config(1.0, 2)).unwrap());
    }

    #[test]
    fn record_format_round() {
        let result = SirResult {
            pair: ("a".into(), "b".into()),
            intervals: vec![Interval::new(1, 6), Interval::new(10, 20)],
            sum_length: 17,
            strengths: vec![1.4, 2.0],
        };
        assert_eq!(result.to_record(), "a\tb\t1-6,10-20\t17\t1.40000e0,2.00000e0");
        let empty = SirResult::empty(("a".into(), "b".into()));
        assert_eq!(empty.to_record(), "a\tb\t-\t0\t-");
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let c = MinerConfig {
            l_min: 0,
            ..MinerConfig::default()
        };
        assert!(c.validate().is_err());
        let c = MinerConfig {
            significance: SignificanceConfig {
                num_randomizations: 0,
                ..SignificanceConfig::default()
            },
            ..MinerConfig::default()
        };
        assert!(c.validate().is_err());
        assert!(MinerConfig::default().validate().is_ok());
    }
}
