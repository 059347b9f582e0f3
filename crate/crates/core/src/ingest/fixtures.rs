//! Built-in reference datasets.
//!
//! These reproduce the published measurement study of block production
//! over one month of Bitcoin (blocks 534,762–539,261; 4,499 blocks) and
//! Steem (blocks 24,671,073–25,563,499; 892,426 blocks) history, plus the
//! stake tables behind the Steem witness election at block 25,563,499.
//!
//! Each fixture stores the study's quotable aggregates exactly; bars the
//! study shows only graphically are filled with estimated values that
//! respect the documented shape and sums. The estimated ranks are marked
//! on the fixture, and exact-value assertions belong only on the quoted
//! aggregates.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::metrics::Distribution;

/// Block count over the one-month Bitcoin window.
pub const BITCOIN_TOTAL_BLOCKS: u64 = 4_499;

/// Block count over the one-month Steem window.
pub const STEEM_TOTAL_BLOCKS: u64 = 892_426;

/// Overall pure VESTS held by the 1,077,405 accounts with at least
/// 1 VESTS, used as the denominator for pure-stake shares.
pub const STEEM_TOTAL_PURE_VESTS: f64 = 3.976e11;

/// Accumulated vote weight summed over every voting stakeholder in the
/// network, used as the denominator when re-allocating all blocks.
pub const STEEM_TOTAL_VOTE_POWER: f64 = 2_380_499_071_458.0;

/// Blocks produced by the top-30 Bitcoin mining pools, descending.
/// Ranks 1–5 are quoted; the tail is estimated fill summing to the total.
const BITCOIN_FIG2: [u64; 30] = [
    848, 661, 571, 525, 494, 310, 280, 235, 180, 130, 90, 60, 40, 11, 9, 8, 7, 6, 5, 5, 4, 4, 3, 3,
    2, 2, 2, 2, 1, 1,
];

/// Blocks produced by the top-30 Steem witnesses, descending. The top-20
/// sum (844,390), their mean (42,219.5) and population std (≈978) match
/// the quoted aggregates; individual bars are estimated.
const STEEM_FIG3: [u64; 30] = [
    43_774, 43_590, 43_427, 43_284, 43_161, 43_059, 42_936, 42_793, 42_650, 42_486, 41_953, 41_789,
    41_646, 41_503, 41_380, 41_278, 41_155, 41_012, 40_849, 40_665, 14_000, 9_500, 7_000, 5_200,
    3_800, 2_900, 2_200, 1_600, 1_100, 736,
];

/// Pure VESTS of the top-30 stakeholders, descending. Rank 1 and the
/// top-2/5/10 sums are quoted; the tail is estimated fill.
const STEEM_FIG4_PURE: [u64; 30] = [
    90_000_000_000,
    36_000_000_000,
    20_000_000_000,
    15_000_000_000,
    13_000_000_000,
    5_000_000_000,
    4_200_000_000,
    3_600_000_000,
    3_300_000_000,
    2_900_000_000,
    2_600_000_000,
    2_400_000_000,
    2_200_000_000,
    2_000_000_000,
    1_850_000_000,
    1_700_000_000,
    1_580_000_000,
    1_460_000_000,
    1_350_000_000,
    1_250_000_000,
    1_160_000_000,
    1_080_000_000,
    1_000_000_000,
    940_000_000,
    880_000_000,
    820_000_000,
    770_000_000,
    720_000_000,
    680_000_000,
    640_000_000,
];

/// Net VESTS of the top-30 stakeholders (voted, no proxy), descending.
/// Rank 1 and the top-3/5 sums are quoted exactly.
const STEEM_FIG5_NET: [u64; 30] = [
    15_800_000_000,
    8_390_338_664,
    8_109_661_336,
    3_300_000_000,
    3_100_000_000,
    2_857_978_947,
    2_474_057_108,
    2_311_787_415,
    2_176_933_149,
    2_045_042_713,
    1_936_566_534,
    1_822_755_462,
    1_741_115_416,
    1_644_925_660,
    1_579_350_921,
    1_467_095_859,
    1_339_439_466,
    1_289_266_058,
    1_235_917_118,
    1_155_893_707,
    1_078_746_955,
    1_007_702_206,
    978_063_906,
    897_595_921,
    844_691_555,
    806_902_723,
    731_880_775,
    694_603_203,
    636_235_511,
    586_378_439,
];

/// Votes cast by the top-30 stakeholders, indexed by net-VESTS rank.
/// Twelve cast the full 30 votes; among ranks 1–7 only three do, and
/// ranks 2 and 4 cast almost none.
const STEEM_FIG6_VOTES: [u64; 30] = [
    30, 2, 30, 1, 30, 7, 8, 30, 9, 30, 10, 30, 11, 30, 12, 30, 14, 30, 15, 30, 17, 18, 30, 20, 30,
    22, 24, 25, 27, 29,
];

/// Accumulated vote weight of the top-30 stakeholders (net VESTS times
/// votes cast), indexed by net-VESTS rank.
const STEEM_FIG7_POWER: [u64; 30] = [
    474_000_000_000,
    16_780_677_328,
    243_289_840_080,
    3_300_000_000,
    93_000_000_000,
    20_005_852_629,
    19_792_456_864,
    69_353_622_450,
    19_592_398_341,
    61_351_281_390,
    19_365_665_340,
    54_682_663_860,
    19_152_269_576,
    49_347_769_800,
    18_952_211_052,
    44_012_875_770,
    18_752_152_524,
    38_677_981_740,
    18_538_756_770,
    34_676_811_210,
    18_338_698_235,
    18_138_639_708,
    29_341_917_180,
    17_951_918_420,
    25_340_746_650,
    17_751_859_906,
    17_565_138_600,
    17_365_080_075,
    17_178_358_797,
    17_004_974_731,
];

/// Accumulated VESTS received by the top-30 witnesses, indexed by witness
/// rank. Mean 5.65E+10 and population std ≈1.06E+10 match the quoted
/// aggregates; the rank-8 witness received the most.
const STEEM_FIG8_WITNESS_POWER: [u64; 30] = [
    71_360_000_000,
    69_300_000_000,
    53_670_000_000,
    73_210_000_000,
    46_630_000_000,
    61_490_000_000,
    67_740_000_000,
    77_540_000_000,
    57_580_000_000,
    51_330_000_000,
    65_400_000_000,
    55_240_000_000,
    70_870_000_000,
    48_980_000_000,
    59_930_000_000,
    44_290_000_000,
    63_060_000_000,
    52_890_000_000,
    66_180_000_000,
    49_780_000_000,
    58_360_000_000,
    41_520_000_000,
    60_710_000_000,
    45_200_000_000,
    58_430_000_000,
    39_130_000_000,
    55_860_000_000,
    42_740_000_000,
    49_400_000_000,
    37_180_000_000,
];

/// Blocks re-allocated to the top-30 stakeholders, indexed by net-VESTS
/// rank. The rank-1 and rank-3 amounts (177,698 and 91,207) are quoted.
const STEEM_FIG9_REALLOC: [u64; 30] = [
    177_698, 6_291, 91_207, 1_237, 34_865, 7_500, 7_420, 26_000, 7_345, 23_000, 7_260, 20_500,
    7_180, 18_500, 7_105, 16_500, 7_030, 14_500, 6_950, 13_000, 6_875, 6_800, 11_000, 6_730, 9_500,
    6_655, 6_585, 6_510, 6_440, 6_375,
];

const FIXTURE_NAMES: [&str; 8] = [
    "bitcoin-fig2",
    "steem-fig3",
    "steem-fig4",
    "steem-fig5",
    "steem-fig6",
    "steem-fig7",
    "steem-fig8",
    "steem-fig9",
];

/// A built-in dataset with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    /// Chart in the source study this dataset reproduces.
    pub figure: &'static str,
    pub description: &'static str,
    /// Unit of the entry values.
    pub unit: &'static str,
    entries: Vec<(String, f64)>,
    /// Population total when the entries are only a top-k slice of it.
    pub total_overall: Option<f64>,
    /// Aggregates quoted by the study, preserved exactly.
    pub quoted: Vec<(&'static str, f64)>,
    /// 1-based ranks whose individual values are estimated fill.
    pub estimated_ranks: Option<RangeInclusive<usize>>,
}

impl Fixture {
    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }

    /// Sum of the first `k` entry values.
    pub fn top_sum(&self, k: usize) -> f64 {
        self.entries.iter().take(k).map(|(_, v)| v).sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v).sum()
    }

    /// A quoted aggregate by key, if the study quotes one.
    pub fn quoted(&self, key: &str) -> Option<f64> {
        self.quoted.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    /// The entries as a sorted [`Distribution`] labelled by fixture name.
    pub fn distribution(&self) -> Distribution {
        Distribution::new(self.name, self.entries.clone()).expect("fixture values are non-negative")
    }
}

fn entries(prefix: &str, values: &[u64]) -> Vec<(String, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("{prefix}-{:02}", i + 1), *v as f64))
        .collect()
}

/// Names of all built-in fixtures.
pub fn fixture_names() -> &'static [&'static str] {
    &FIXTURE_NAMES
}

/// Loads a built-in dataset by name.
///
/// Stakeholder fixtures (`steem-fig5/6/7/9`) share the `stakeholder-NN`
/// id space, indexed by net-VESTS rank, so they join row-for-row. The
/// pure-stake fixture (`steem-fig4`) is ranked by pure VESTS, a different
/// ordering, and uses its own `pure-NN` ids.
pub fn load_fixture(name: &str) -> Result<Fixture> {
    let fixture = match name {
        "bitcoin-fig2" => Fixture {
            name: "bitcoin-fig2",
            figure: "fig. 2",
            description: "blocks mined by the top-30 Bitcoin pools over one month",
            unit: "blocks",
            entries: entries("pool", &BITCOIN_FIG2),
            total_overall: None,
            quoted: vec![
                ("total", 4_499.0),
                ("rank_1", 848.0),
                ("rank_2", 661.0),
                ("rank_3", 571.0),
                ("rank_4", 525.0),
                ("rank_5", 494.0),
                ("top_2_sum", 1_509.0),
                ("top_4_sum", 2_605.0),
                ("top_2_share", 0.335),
                ("top_4_share", 0.579),
            ],
            estimated_ranks: Some(6..=30),
        },
        "steem-fig3" => Fixture {
            name: "steem-fig3",
            figure: "fig. 3",
            description: "blocks produced by the top-30 Steem witnesses over one month",
            unit: "blocks",
            entries: entries("witness", &STEEM_FIG3),
            total_overall: None,
            quoted: vec![
                ("total", 892_426.0),
                ("top_20_sum", 844_390.0),
                ("top_20_share", 0.946),
                ("top_20_mean", 42_219.0),
                ("top_20_std", 978.0),
            ],
            estimated_ranks: Some(1..=30),
        },
        "steem-fig4" => Fixture {
            name: "steem-fig4",
            figure: "fig. 4",
            description: "pure VESTS of the top-30 stakeholders at the snapshot block",
            unit: "VESTS",
            entries: entries("pure", &STEEM_FIG4_PURE),
            total_overall: Some(STEEM_TOTAL_PURE_VESTS),
            quoted: vec![
                ("rank_1", 9.00e10),
                ("top_2_sum", 1.26e11),
                ("top_5_sum", 1.74e11),
                ("top_10_sum", 1.93e11),
                ("top_1_share", 0.227),
                ("top_10_share", 0.485),
            ],
            estimated_ranks: Some(3..=30),
        },
        "steem-fig5" => Fixture {
            name: "steem-fig5",
            figure: "fig. 5",
            description: "net VESTS of the top-30 voting stakeholders",
            unit: "VESTS",
            entries: entries("stakeholder", &STEEM_FIG5_NET),
            total_overall: None,
            quoted: vec![
                ("rank_1", 1.58e10),
                ("top_3_sum", 3.23e10),
                ("top_5_sum", 3.87e10),
            ],
            estimated_ranks: Some(2..=30),
        },
        "steem-fig6" => Fixture {
            name: "steem-fig6",
            figure: "fig. 6",
            description: "witness votes cast by the top-30 stakeholders, by net-VESTS rank",
            unit: "votes",
            entries: entries("stakeholder", &STEEM_FIG6_VOTES),
            total_overall: None,
            quoted: vec![("full_voters", 12.0), ("full_voters_top_7", 3.0)],
            estimated_ranks: Some(1..=30),
        },
        "steem-fig7" => Fixture {
            name: "steem-fig7",
            figure: "fig. 7",
            description: "accumulated vote weight of the top-30 stakeholders, by net-VESTS rank",
            unit: "VESTS",
            entries: entries("stakeholder", &STEEM_FIG7_POWER),
            total_overall: Some(STEEM_TOTAL_VOTE_POWER),
            quoted: vec![("rank_1", 4.74e11)],
            estimated_ranks: Some(2..=30),
        },
        "steem-fig8" => Fixture {
            name: "steem-fig8",
            figure: "fig. 8",
            description: "accumulated VESTS received by the top-30 witnesses",
            unit: "VESTS",
            entries: entries("witness", &STEEM_FIG8_WITNESS_POWER),
            total_overall: None,
            quoted: vec![("mean", 5.65e10), ("std", 1.06e10)],
            estimated_ranks: Some(1..=30),
        },
        "steem-fig9" => Fixture {
            name: "steem-fig9",
            figure: "fig. 9",
            description: "blocks re-allocated to the top-30 stakeholders, by net-VESTS rank",
            unit: "blocks",
            entries: entries("stakeholder", &STEEM_FIG9_REALLOC),
            total_overall: Some(STEEM_TOTAL_BLOCKS as f64),
            quoted: vec![
                ("rank_1_blocks", 177_698.0),
                ("rank_3_blocks", 91_207.0),
                ("rank_1_overall_share", 0.200),
                ("rank_3_overall_share", 0.101),
            ],
            estimated_ranks: Some(2..=30),
        },
        other => {
            return Err(Error::UnknownFixture {
                name: other.to_string(),
                available: FIXTURE_NAMES.to_vec(),
            })
        }
    };
    Ok(fixture)
}
