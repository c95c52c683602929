//! Relationship measures behind a constant-time range-query engine.
//!
//! Every measure is the mean of a per-timestamp kernel over the queried
//! interval: `x[t]*y[t]` for AP, its negation for nAP, and the squared
//! difference for MSE. Means of adjacent segments always sit between the
//! segment means, which is the merge bound the partitioned solver relies on.
//! Dividing by anything other than the timestamp count would break that
//! bound, so all three measures share the `e - s + 1` denominator.

use crate::error::{Error, Result};
use crate::stats::CompensatedSum;
use crate::types::{Interval, TimeSeries};

/// Which kernel the engine aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    /// Average product: mean of `x[t]*y[t]`. Similarity.
    Ap,
    /// Negative average product, exactly `-AP`. Similarity.
    NAp,
    /// Mean squared difference. Distance.
    Mse,
}

/// Whether strength means "at least tau" or "at most tau".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Similarity,
    Distance,
}

impl MeasureKind {
    pub fn orientation(self) -> Orientation {
        match self {
            MeasureKind::Ap | MeasureKind::NAp => Orientation::Similarity,
            MeasureKind::Mse => Orientation::Distance,
        }
    }

    fn kernel(self, x: f64, y: f64) -> f64 {
        match self {
            MeasureKind::Ap => x * y,
            MeasureKind::NAp => -(x * y),
            MeasureKind::Mse => (x - y) * (x - y),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Ap => "ap",
            MeasureKind::NAp => "nap",
            MeasureKind::Mse => "mse",
        }
    }
}

/// Precomputed per-pair structure answering `rel[s,e]` in O(1).
///
/// Holds `N+1` compensated prefix sums of the kernel, with `prefix[0] = 0`.
/// Immutable after build; concurrent queries are safe.
#[derive(Debug, Clone)]
pub struct MeasureEngine {
    kind: MeasureKind,
    orientation: Orientation,
    pair: (String, String),
    n: usize,
    prefix: Vec<f64>,
}

impl MeasureEngine {
    /// Build the engine in O(N). The two series must have equal length;
    /// finiteness is guaranteed by `TimeSeries` construction.
    pub fn build(x: &TimeSeries, y: &TimeSeries, kind: MeasureKind) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                a: x.id().to_string(),
                la: x.len(),
                b: y.id().to_string(),
                lb: y.len(),
            });
        }
        let n = x.len();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = CompensatedSum::default();
        for (&a, &b) in x.values().iter().zip(y.values()) {
            acc.add(kind.kernel(a, b));
            prefix.push(acc.value());
        }
        Ok(Self {
            kind,
            orientation: kind.orientation(),
            pair: (x.id().to_string(), y.id().to_string()),
            n,
            prefix,
        })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Ids of the two series the engine was built from.
    pub fn pair(&self) -> (&str, &str) {
        (&self.pair.0, &self.pair.1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Mean of the kernel over `iv`. Defined for singletons.
    ///
    /// Panics when the interval extends past the series, like slice indexing.
    pub fn rel(&self, iv: Interval) -> f64 {
        assert!(
            iv.end() <= self.n,
            "interval [{},{}] out of bounds for N={}",
            iv.start(),
            iv.end(),
            self.n
        );
        (self.prefix[iv.end()] - self.prefix[iv.start() - 1]) / iv.len() as f64
    }

    /// Orientation-aware strength test: `rel >= tau` for similarity
    /// measures, `rel <= tau` for distances.
    pub fn is_strong(&self, iv: Interval, tau: f64) -> bool {
        match self.orientation {
            Orientation::Similarity => self.rel(iv) >= tau,
            Orientation::Distance => self.rel(iv) <= tau,
        }
    }
}
