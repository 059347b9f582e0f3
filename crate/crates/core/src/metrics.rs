//! Normalization, top-r Shannon entropy and distribution statistics.
//!
//! A [`Distribution`] is an ordered list of (generator, blocks) pairs.
//! Entropy is always computed over the top-r entries with probabilities
//! renormalized within that range, so `0 <= H <= log2(r)` and chains with
//! different generator populations stay comparable.

use serde::Serialize;

use crate::error::{Error, Result};

/// A labelled generator distribution, ordered by descending value with
/// ties broken by ascending id. Construction enforces the ordering, so
/// every consumer can rely on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub label: String,
    values: Vec<(String, f64)>,
}

impl Distribution {
    /// Builds a distribution, sorting entries and rejecting negative or
    /// non-finite values.
    pub fn new(label: impl Into<String>, entries: Vec<(String, f64)>) -> Result<Self> {
        let label = label.into();
        for (id, value) in &entries {
            if !(value.is_finite() && *value >= 0.0) {
                return Err(Error::DegenerateInput(format!(
                    "distribution `{label}`: entry `{id}` has invalid value {value}"
                )));
            }
        }
        let mut values = entries;
        values.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(Distribution { label, values })
    }

    pub fn values(&self) -> &[(String, f64)] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn blocks(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|(_, v)| *v)
    }

    fn check_rank(&self, r: usize) -> Result<()> {
        if r == 0 || r > self.len() {
            return Err(Error::RankOutOfRange {
                label: self.label.clone(),
                r,
                len: self.len(),
            });
        }
        Ok(())
    }
}

/// Divides every value by the rank-1 value, mapping the distribution onto
/// [0, 1] with the first element exactly 1.
pub fn normalize(dist: &Distribution) -> Result<Vec<f64>> {
    let Some(&(_, top)) = dist.values().first() else {
        return Err(Error::DegenerateInput(format!(
            "distribution `{}` is empty",
            dist.label
        )));
    };
    if top <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "distribution `{}` is all zero",
            dist.label
        )));
    }
    Ok(dist.blocks().map(|v| v / top).collect())
}

/// Shannon entropy in bits of the top-r entries, with probabilities
/// renormalized over that range. Zero values contribute nothing
/// (0·log 0 := 0).
pub fn shannon_entropy(dist: &Distribution, r: usize) -> Result<f64> {
    dist.check_rank(r)?;
    let top: Vec<f64> = dist.blocks().take(r).collect();
    let sum: f64 = top.iter().sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "distribution `{}`: top-{r} sum is zero",
            dist.label
        )));
    }
    let mut entropy = 0.0;
    for value in top {
        if value > 0.0 {
            let p = value / sum;
            entropy -= p * p.log2();
        }
    }
    Ok(entropy)
}

/// Mean, population standard deviation and overall share of the top-r
/// entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistStats {
    pub mean: f64,
    pub std: f64,
    pub top_r_share: f64,
}

pub fn distribution_stats(dist: &Distribution, r: usize) -> Result<DistStats> {
    dist.check_rank(r)?;
    let total: f64 = dist.blocks().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "distribution `{}` is all zero",
            dist.label
        )));
    }
    let top: Vec<f64> = dist.blocks().take(r).collect();
    let top_sum: f64 = top.iter().sum();
    let mean = top_sum / r as f64;
    let variance = top.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / r as f64;
    Ok(DistStats {
        mean,
        std: variance.sqrt(),
        top_r_share: top_sum / total,
    })
}

/// One entropy measurement: range, entropy in bits, share of all blocks
/// held by the top-r generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyRow {
    pub r: usize,
    pub entropy_bits: f64,
    pub top_r_share: f64,
}

/// Entropy rows for one distribution across several ranges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub label: String,
    pub rows: Vec<EntropyRow>,
}

/// Entropy and share at each requested range for one distribution.
pub fn entropy_report(dist: &Distribution, r_values: &[usize]) -> Result<EntropyReport> {
    let rows = r_values
        .iter()
        .map(|&r| {
            Ok(EntropyRow {
                r,
                entropy_bits: shannon_entropy(dist, r)?,
                top_r_share: distribution_stats(dist, r)?.top_r_share,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyReport {
        label: dist.label.clone(),
        rows,
    })
}

/// A distribution scaled to its rank-1 value, ready for overlay plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedSeries {
    pub label: String,
    pub values: Vec<f64>,
}

/// Side-by-side comparison of several distributions: entropy rows per
/// distribution and range, plus the normalized series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub reports: Vec<EntropyReport>,
    pub series: Vec<NormalizedSeries>,
}

/// Compares distributions across ranges. Input order is preserved, so the
/// report is a pure function of its arguments.
pub fn compare(dists: &[Distribution], r_values: &[usize]) -> Result<ComparisonReport> {
    let reports = dists
        .iter()
        .map(|d| entropy_report(d, r_values))
        .collect::<Result<Vec<_>>>()?;
    let series = dists
        .iter()
        .map(|d| {
            Ok(NormalizedSeries {
                label: d.label.clone(),
                values: normalize(d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport { reports, series })
}
