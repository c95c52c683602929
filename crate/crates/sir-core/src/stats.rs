//! Small numeric helpers shared across modules.

/// Neumaier-compensated running sum. Keeps prefix arrays accurate to a few
/// ulps even for long series.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for &x in xs {
        acc.add(x);
    }
    acc.value() / xs.len() as f64
}

/// Population variance (divide by N).
pub(crate) fn population_variance(xs: &[f64], mean: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for &x in xs {
        let d = x - mean;
        acc.add(d * d);
    }
    acc.value() / xs.len() as f64
}

/// Z-score with population variance. Returns `None` when the variance is zero.
pub(crate) fn zscore_slice(xs: &[f64]) -> Option<Vec<f64>> {
    let m = mean(xs);
    let var = population_variance(xs, m);
    if var == 0.0 || !var.is_finite() {
        return None;
    }
    let sd = var.sqrt();
    Some(xs.iter().map(|&x| (x - m) / sd).collect())
}

/// Sample Pearson correlation. Returns NaN when either side has zero variance.
pub(crate) fn pearson(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Format with six significant digits, the precision used by all text records.
pub(crate) fn format_sig6(x: f64) -> String {
    format!("{:.5e}", x)
}
