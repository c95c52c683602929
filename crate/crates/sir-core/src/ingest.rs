//! Loading multivariate time-series tables and the preprocessing transforms:
//! linear detrend, seasonal-anomaly removal, and global or per-segment
//! z-scoring.
//!
//! Input format: a comma-separated table with a header row of series ids and
//! one row per timestamp. An optional sidecar config (`<input>.toml`) may
//! declare a seasonal `period` and/or `segments` boundaries:
//!
//! ```toml
//! period = 12
//! segments = [[1, 120], [121, 240]]
//! ```
//!
//! Z-scoring uses the population variance (divide by N), so the full-length
//! AP of a z-scored series with itself is exactly 1. Missing values are
//! rejected at load time, never imputed.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::stats;
use crate::types::TimeSeries;

/// A set of equal-length series plus optional sidecar metadata.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub series: Vec<TimeSeries>,
    /// Seasonal period (e.g. 12 for monthly data with annual seasonality).
    pub period: Option<usize>,
    /// 1-based inclusive segment boundaries tiling `[1,N]`.
    pub segments: Option<Vec<(usize, usize)>>,
}

impl Dataset {
    /// Number of timestamps shared by every series.
    pub fn n(&self) -> usize {
        self.series.first().map_or(0, TimeSeries::len)
    }

    pub fn get(&self, id: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.id() == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.series.iter().map(TimeSeries::id).collect()
    }
}

/// How to locate the sidecar config when loading.
#[derive(Debug, Clone, Default)]
pub enum SidecarPolicy {
    /// Use `<input>.toml` next to the table when it exists.
    #[default]
    Auto,
    /// Read exactly this file.
    Path(PathBuf),
    /// Never read a sidecar.
    Ignore,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub sidecar: SidecarPolicy,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SidecarConfig {
    period: Option<usize>,
    segments: Option<Vec<(usize, usize)>>,
}

/// Load a CSV table: one series per column, rows are consecutive timestamps.
pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|source| match source.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: match source.into_kind() {
                    csv::ErrorKind::Io(e) => e,
                    _ => unreachable!(),
                },
            },
            _ => Error::Csv {
                path: path.to_path_buf(),
                source,
            },
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(Error::NoDataRows {
            path: path.to_path_buf(),
        });
    }
    for (i, name) in headers.iter().enumerate() {
        if headers[..i].contains(name) {
            return Err(Error::DuplicateColumn { name: name.clone() });
        }
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row_idx, record) in reader.records().enumerate() {
        // 1-based data row number, header excluded.
        let row = row_idx + 1;
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row,
                expected: headers.len(),
                got: record.len(),
            });
        }
        for (col_idx, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::BadCell {
                value: field.to_string(),
                row,
                col: headers[col_idx].clone(),
            })?;
            if !value.is_finite() {
                return Err(Error::BadCell {
                    value: field.to_string(),
                    row,
                    col: headers[col_idx].clone(),
                });
            }
            columns[col_idx].push(value);
        }
    }
    if columns[0].is_empty() {
        return Err(Error::NoDataRows {
            path: path.to_path_buf(),
        });
    }

    let series = headers
        .into_iter()
        .zip(columns)
        .map(|(id, values)| TimeSeries::new(id, values))
        .collect::<Result<Vec<_>>>()?;

    let sidecar_path = match &options.sidecar {
        SidecarPolicy::Auto => {
            let candidate = path.with_extension("toml");
            candidate.exists().then_some(candidate)
        }
        SidecarPolicy::Path(p) => Some(p.clone()),
        SidecarPolicy::Ignore => None,
    };
    let (period, segments) = match sidecar_path {
        None => (None, None),
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|source| Error::Io {
                path: p.clone(),
                source,
            })?;
            let config: SidecarConfig = toml::from_str(&text).map_err(|e| Error::BadSidecar {
                path: p.clone(),
                message: e.to_string(),
            })?;
            if let Some(period) = config.period {
                if period < 1 {
                    return Err(Error::BadPeriod);
                }
            }
            if let Some(segments) = &config.segments {
                check_segments(segments, series[0].len())?;
            }
            (config.period, config.segments)
        }
    };

    Ok(Dataset {
        series,
        period,
        segments,
    })
}

/// Segments must be 1-based, ascending, disjoint, and tile `[1,N]`.
fn check_segments(segments: &[(usize, usize)], n: usize) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::BadSegments("no segments given".into()));
    }
    let mut expected_start = 1;
    for &(s, e) in segments {
        if s != expected_start {
            return Err(Error::BadSegments(format!(
                "segment [{s},{e}] does not start at {expected_start}"
            )));
        }
        if e < s {
            return Err(Error::BadSegments(format!("segment [{s},{e}] is reversed")));
        }
        expected_start = e + 1;
    }
    if expected_start != n + 1 {
        return Err(Error::BadSegments(format!(
            "segments cover [1,{}] but the series has {} timestamps",
            expected_start - 1,
            n
        )));
    }
    Ok(())
}

/// Subtract the least-squares line over `t = 1..=N`. The residual is
/// orthogonal to the time index.
pub fn detrend_linear(series: &TimeSeries) -> TimeSeries {
    let n = series.len();
    if n == 1 {
        return TimeSeries::new(series.id(), vec![0.0]).unwrap();
    }
    let values = series.values();
    let t_mean = (n as f64 + 1.0) / 2.0;
    let y_mean = stats::mean(values);
    let mut sty = 0.0;
    let mut stt = 0.0;
    for (i, &y) in values.iter().enumerate() {
        let dt = (i + 1) as f64 - t_mean;
        sty += dt * (y - y_mean);
        stt += dt * dt;
    }
    let slope = sty / stt;
    let detrended = values
        .iter()
        .enumerate()
        .map(|(i, &y)| y - (y_mean + slope * ((i + 1) as f64 - t_mean)))
        .collect();
    TimeSeries::new(series.id(), detrended).unwrap()
}

/// Subtract the per-phase mean: for each phase `p` in `[1,P]`, remove the
/// mean of observations at timestamps congruent to `p` mod `P`.
pub fn deseasonalize(series: &TimeSeries, period: usize) -> Result<TimeSeries> {
    if period < 1 {
        return Err(Error::BadPeriod);
    }
    let values = series.values();
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for (i, &v) in values.iter().enumerate() {
        sums[i % period] += v;
        counts[i % period] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let out = values
        .iter()
        .enumerate()
        .map(|(i, &v)| v - means[i % period])
        .collect();
    Ok(TimeSeries::new(series.id(), out).expect("finite residuals"))
}

/// Z-score with population variance: mean 0, variance 1.
pub fn zscore(series: &TimeSeries) -> Result<TimeSeries> {
    let z = stats::zscore_slice(series.values()).ok_or_else(|| Error::ZeroVariance {
        id: series.id().to_string(),
    })?;
    TimeSeries::new(series.id(), z)
}

/// Z-score each segment independently. Boundaries must tile `[1,N]`.
pub fn zscore_segments(series: &TimeSeries, boundaries: &[(usize, usize)]) -> Result<TimeSeries> {
    check_segments(boundaries, series.len())?;
    let values = series.values();
    let mut out = Vec::with_capacity(values.len());
    for &(s, e) in boundaries {
        let chunk = &values[s - 1..e];
        let z = stats::zscore_slice(chunk).ok_or_else(|| Error::ZeroVarianceSegment {
            id: series.id().to_string(),
            s,
            e,
        })?;
        out.extend(z);
    }
    TimeSeries::new(series.id(), out)
}

/// Preprocessing presets applied column by column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    /// Leave the data as loaded.
    #[default]
    None,
    /// Global z-score only.
    ZScore,
    /// Deseasonalize, then detrend, then z-score. Needs a period.
    Climate,
    /// Per-segment z-score. Needs segment boundaries.
    Fmri,
}

/// Apply a preset to every series, reading period/segments from the dataset.
pub fn preprocess(dataset: &Dataset, preset: Preset) -> Result<Dataset> {
    let series = match preset {
        Preset::None => dataset.series.clone(),
        Preset::ZScore => dataset
            .series
            .iter()
            .map(zscore)
            .collect::<Result<Vec<_>>>()?,
        Preset::Climate => {
            let period = dataset.period.ok_or_else(|| {
                Error::InvalidConfig("climate preset needs a period (sidecar or --period)".into())
            })?;
            dataset
                .series
                .iter()
                .map(|s| zscore(&detrend_linear(&deseasonalize(s, period)?)))
                .collect::<Result<Vec<_>>>()?
        }
        Preset::Fmri => {
            let segments = dataset.segments.as_deref().ok_or_else(|| {
                Error::InvalidConfig("fmri preset needs segment boundaries (sidecar)".into())
            })?;
            dataset
                .series
                .iter()
                .map(|s| zscore_segments(s, segments))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(Dataset {
        series,
        period: dataset.period,
        segments: dataset.segments.clone(),
    })
}
