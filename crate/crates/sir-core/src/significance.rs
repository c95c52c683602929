//! Randomization significance for a discovered SIR: repeatedly swap one
//! series of the pair for a random series whose full-length correlation
//! with the other is preserved, re-mine, and read the p-value off the null
//! sum-length distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::map_ordered;
use crate::measures::MeasureEngine;
use crate::pdp::solve_pdp;
use crate::stats::{self, format_sig6};
use crate::types::{MinerConfig, TimeSeries};

/// Outcome of one significance test.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceReport {
    pub pair: (String, String),
    pub observed_sum_length: usize,
    /// Sum-length of the SIR re-mined for each null replicate.
    pub null_sum_lengths: Vec<usize>,
    /// Fraction of nulls with sum-length at or above the observed one.
    /// Ties count against the observed value.
    pub p_value: f64,
    pub num_randomizations: usize,
    pub rng_seed: u64,
}

impl SignificanceReport {
    /// One-line record: pair ids, observed sum-length, M, seed, p-value.
    /// With `verbose` the full null distribution is appended for plotting.
    pub fn to_record(&self, verbose: bool) -> String {
        let mut line = format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.pair.0,
            self.pair.1,
            self.observed_sum_length,
            self.num_randomizations,
            self.rng_seed,
            format_sig6(self.p_value)
        );
        if verbose {
            let nulls = self
                .null_sum_lengths
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",");
            line.push('\t');
            line.push_str(&nulls);
        }
        line
    }
}

/// Draw a z-scored series of independent standard normals. Used for null
/// construction and for the synthetic benchmark pairs.
pub fn random_normal_series(id: &str, n: usize, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let values: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(z) = stats::zscore_slice(&values) {
            return TimeSeries::new(id, z).expect("finite z-scored values");
        }
        // Zero-variance draw; try again (n = 1 aside, vanishingly rare).
    }
}

/// Generate a z-scored random series whose sample Pearson correlation with
/// `fixed` equals `rho` to within float rounding.
///
/// Construction: draw white noise, remove its projection onto the z-scored
/// fixed series, z-score the residual to get an exactly orthogonal unit
/// component, and mix `rho * z_fixed + sqrt(1 - rho^2) * residual`.
pub fn random_series_with_correlation(
    fixed: &TimeSeries,
    rho: f64,
    rng: &mut impl Rng,
) -> Result<TimeSeries> {
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(Error::InvalidRho { rho });
    }
    let n = fixed.len();
    if n < 3 {
        return Err(Error::TooShortForRandomization {
            id: fixed.id().to_string(),
            n,
        });
    }
    let z_fixed = stats::zscore_slice(fixed.values()).ok_or_else(|| Error::ZeroVariance {
        id: fixed.id().to_string(),
    })?;
    if rho == 1.0 {
        return TimeSeries::new("rand", z_fixed);
    }
    if rho == -1.0 {
        return TimeSeries::new("rand", z_fixed.iter().map(|v| -v).collect());
    }

    let zz: f64 = z_fixed.iter().map(|v| v * v).sum();
    let scale = (1.0 - rho * rho).sqrt();
    loop {
        let noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let wz: f64 = noise.iter().zip(&z_fixed).map(|(w, z)| w * z).sum();
        let coeff = wz / zz;
        let perp: Vec<f64> = noise
            .iter()
            .zip(&z_fixed)
            .map(|(w, z)| w - coeff * z)
            .collect();
        // A draw nearly collinear with the fixed series leaves only
        // cancellation dust behind; redraw rather than amplify it.
        let noise_var = stats::population_variance(&noise, stats::mean(&noise));
        let perp_var = stats::population_variance(&perp, stats::mean(&perp));
        if !perp_var.is_finite() || perp_var <= 1e-6 * noise_var {
            continue;
        }
        let residual = match stats::zscore_slice(&perp) {
            Some(z) => z,
            None => continue,
        };
        let mixed: Vec<f64> = z_fixed
            .iter()
            .zip(&residual)
            .map(|(z, r)| rho * z + scale * r)
            .collect();
        let z_mixed = match stats::zscore_slice(&mixed) {
            Some(z) => z,
            None => continue,
        };
        if (stats::pearson(&z_mixed, &z_fixed) - rho).abs() <= 1e-12 {
            return TimeSeries::new("rand", z_mixed);
        }
    }
}

/// Mine the observed SIR, generate `M` correlation-preserving nulls
/// (replacing the first series unless configured otherwise), re-mine each,
/// and report `p = |{m : null_sl[m] >= observed}| / M`.
///
/// Each replicate draws from its own RNG stream derived from the seed, so
/// the report is byte-reproducible for any `workers` setting.
pub fn significance_test(
    t1: &TimeSeries,
    t2: &TimeSeries,
    config: &MinerConfig,
    workers: usize,
) -> Result<SignificanceReport> {
    config.validate()?;
    let engine = MeasureEngine::build(t1, t2, config.measure)?;
    let observed = solve_pdp(&engine, config.tau, config.l_min);

    let (replaced, kept) = if config.significance.replace_second {
        (t2, t1)
    } else {
        (t1, t2)
    };
    let rho = stats::pearson(replaced.values(), kept.values());
    if !rho.is_finite() {
        return Err(Error::ZeroVariance {
            id: if stats::zscore_slice(t1.values()).is_none() {
                t1.id().to_string()
            } else {
                t2.id().to_string()
            },
        });
    }
    let rho = rho.clamp(-1.0, 1.0);

    let m = config.significance.num_randomizations;
    let seed = config.significance.rng_seed;
    let streams: Vec<u64> = (0..m as u64).collect();
    let nulls: Vec<Result<usize>> = map_ordered(&streams, workers, |&stream| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let rand_series = random_series_with_correlation(kept, rho, &mut rng)?;
        let null_engine = if config.significance.replace_second {
            MeasureEngine::build(t1, &rand_series, config.measure)?
        } else {
            MeasureEngine::build(&rand_series, t2, config.measure)?
        };
        Ok(solve_pdp(&null_engine, config.tau, config.l_min).sum_length)
    });
    let null_sum_lengths: Vec<usize> = nulls.into_iter().collect::<Result<_>>()?;

    let exceed = null_sum_lengths
        .iter()
        .filter(|&&sl| sl >= observed.sum_length)
        .count();
    Ok(SignificanceReport {
        pair: (t1.id().to_string(), t2.id().to_string()),
        observed_sum_length: observed.sum_length,
        null_sum_lengths,
        p_value: exceed as f64 / m as f64,
        num_randomizations: m,
        rng_seed: seed,
    })
}
