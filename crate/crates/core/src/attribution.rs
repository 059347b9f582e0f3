//! Block counting and re-allocation of blocks to stakeholders.
//!
//! [`count_blocks`] tallies a block stream per generator. [`reallocate`]
//! then attributes witness-produced blocks back to the stakeholders whose
//! votes seated those witnesses, either proportionally to global
//! stakeholder power or by splitting each witness's blocks among its own
//! voters.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::election::{NetVestsTable, PowerBasis, PowerTable};
use crate::error::{Error, Result};
use crate::ledger::AccountId;

/// One block: height, who produced it, optional timestamp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub height: u64,
    pub generator: String,
    pub timestamp: Option<u64>,
}

impl BlockRecord {
    pub fn new(height: u64, generator: impl Into<String>) -> Self {
        BlockRecord {
            height,
            generator: generator.into(),
            timestamp: None,
        }
    }
}

/// Per-generator block tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratorCounts {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl GeneratorCounts {
    /// Merges two tallies; associative and commutative, so partitioned
    /// streams can be counted in parallel and folded together.
    pub fn merge(mut self, other: GeneratorCounts) -> GeneratorCounts {
        for (generator, count) in other.counts {
            *self.counts.entry(generator).or_insert(0) += count;
        }
        self.total += other.total;
        self
    }

    /// Generators by descending count, ties broken by ascending id.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut ranked: Vec<(&str, u64)> = self
            .counts
            .iter()
            .map(|(id, c)| (id.as_str(), *c))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }
}

/// Tallies blocks per generator. Heights need not be contiguous, but a
/// repeated height is a data error naming the height.
pub fn count_blocks<I>(stream: I) -> Result<GeneratorCounts>
where
    I: IntoIterator<Item = BlockRecord>,
{
    count_block_stream(stream.into_iter().map(Ok))
}

/// [`count_blocks`] over a fallible stream, propagating the first error.
/// This is the shape loaders produce, so counting never needs the whole
/// file in memory.
pub fn count_block_stream<I>(stream: I) -> Result<GeneratorCounts>
where
    I: IntoIterator<Item = Result<BlockRecord>>,
{
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut seen = HashSet::new();
    let mut total = 0u64;
    for record in stream {
        let record = record?;
        if !seen.insert(record.height) {
            return Err(Error::DuplicateHeight(record.height));
        }
        *counts.entry(record.generator).or_insert(0) += 1;
        total += 1;
    }
    Ok(GeneratorCounts { counts, total })
}

/// How witness-produced blocks are attributed back to stakeholders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMode {
    /// Every block in the stream is split across all stakeholders in
    /// proportion to their accumulated vote weight.
    GlobalProportional,
    /// Each witness's blocks are split among that witness's own voters in
    /// proportion to their net VESTS.
    PerWitnessSplit,
}

impl fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AllocationMode::GlobalProportional => "global-proportional",
            AllocationMode::PerWitnessSplit => "per-witness-split",
        };
        f.write_str(s)
    }
}

impl FromStr for AllocationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global-proportional" | "global_proportional" | "global" => {
                Ok(AllocationMode::GlobalProportional)
            }
            "per-witness-split" | "per_witness_split" | "per-witness" => {
                Ok(AllocationMode::PerWitnessSplit)
            }
            other => Err(Error::Format {
                path: String::new(),
                message: format!("unknown allocation mode `{other}`"),
            }),
        }
    }
}

/// Blocks re-allocated to stakeholders.
///
/// Shares are real-valued; rounding to integers is presentation only
/// (see [`largest_remainder_round`]). Allocated shares, blocks left on
/// witnesses nobody powers (`unallocated`), and blocks from generators
/// outside the witness table (`unattributed`) always sum to `total`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub shares: BTreeMap<AccountId, f64>,
    /// Blocks produced by witnesses with zero received power.
    pub unallocated: f64,
    /// Blocks produced by generators absent from the witness table.
    pub unattributed: f64,
    pub total: f64,
    pub mode: AllocationMode,
}

impl AllocationResult {
    pub fn allocated(&self) -> f64 {
        self.shares.values().sum()
    }

    /// Stakeholders by descending share, ties broken by ascending id.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut ranked: Vec<(&str, f64)> = self
            .shares
            .iter()
            .map(|(id, s)| (id.as_str(), *s))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }
}

/// Re-allocates counted blocks to stakeholders.
///
/// `global_proportional` distributes `counts.total` in proportion to the
/// stakeholder power table. `per_witness_split` walks each witness's
/// blocks to its own voters in proportion to their net VESTS, leaving
/// blocks of zero-power witnesses unallocated and blocks of unknown
/// generators unattributed.
pub fn reallocate(
    counts: &GeneratorCounts,
    stakeholder: &PowerTable,
    witness: &PowerTable,
    net: &NetVestsTable,
    votes: &BTreeMap<AccountId, BTreeSet<AccountId>>,
    mode: AllocationMode,
) -> Result<AllocationResult> {
    if stakeholder.basis != PowerBasis::Stakeholder {
        return Err(Error::DegenerateInput(
            "stakeholder table has witness basis".into(),
        ));
    }
    if witness.basis != PowerBasis::Witness {
        return Err(Error::DegenerateInput(
            "witness table has stakeholder basis".into(),
        ));
    }
    let total_power = stakeholder.total();
    if total_power <= 0.0 || total_power.is_nan() {
        return Err(Error::DegenerateInput(
            "all stakeholder powers are zero".into(),
        ));
    }
    let total = counts.total as f64;

    match mode {
        AllocationMode::GlobalProportional => {
            let shares = stakeholder
                .entries
                .iter()
                .filter(|(_, power)| **power > 0.0)
                .map(|(id, power)| (id.clone(), total * power / total_power))
                .collect();
            Ok(AllocationResult {
                shares,
                unallocated: 0.0,
                unattributed: 0.0,
                total,
                mode,
            })
        }
        AllocationMode::PerWitnessSplit => {
            // Invert the vote map once: witness -> voters.
            let mut voters_of: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
            for (voter, voted) in votes {
                for w in voted {
                    voters_of
                        .entry(w.as_str())
                        .or_default()
                        .push(voter.as_str());
                }
            }
            let mut shares: BTreeMap<AccountId, f64> = BTreeMap::new();
            let mut unallocated = 0.0;
            let mut unattributed = 0.0;
            for (generator, blocks) in &counts.counts {
                let blocks = *blocks as f64;
                let Some(power) = witness.entries.get(generator) else {
                    unattributed += blocks;
                    continue;
                };
                if *power <= 0.0 || power.is_nan() {
                    unallocated += blocks;
                    continue;
                }
                for voter in voters_of.get(generator.as_str()).into_iter().flatten() {
                    let weight = net.net(voter);
                    if weight > 0.0 {
                        *shares.entry((*voter).to_string()).or_insert(0.0) +=
                            blocks * weight / power;
                    }
                }
            }
            Ok(AllocationResult {
                shares,
                unallocated,
                unattributed,
                total,
                mode,
            })
        }
    }
}

/// Rounds real-valued shares to integers summing exactly to `total`,
/// using the largest-remainder method (ties broken by ascending id).
/// Presentation helper for reports; the underlying shares stay real.
pub fn largest_remainder_round(shares: &[(String, f64)], total: u64) -> Vec<(String, u64)> {
    let sum: f64 = shares.iter().map(|(_, s)| s).sum();
    if sum <= 0.0 {
        return shares.iter().map(|(id, _)| (id.clone(), 0)).collect();
    }
    let scaled: Vec<f64> = shares
        .iter()
        .map(|(_, s)| s.max(0.0) / sum * total as f64)
        .collect();
    let mut rounded: Vec<u64> = scaled.iter().map(|s| s.floor() as u64).collect();
    let assigned: u64 = rounded.iter().sum();
    let mut leftover = (total - assigned) as usize;

    let mut by_remainder: Vec<usize> = (0..shares.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra)
            .then_with(|| shares[a].0.cmp(&shares[b].0))
    });
    for &i in &by_remainder {
        if leftover == 0 {
            break;
        }
        rounded[i] += 1;
        leftover -= 1;
    }
    shares
        .iter()
        .zip(rounded)
        .map(|((id, _), r)| (id.clone(), r))
        .collect()
}
