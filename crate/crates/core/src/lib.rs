//! Quantifies how decentralized block production really is in PoW and
//! DPoS blockchains.
//!
//! For a proof-of-work chain the question is settled by counting: whoever
//! mined a block controlled it. For a delegated-proof-of-stake chain the
//! witnesses who sign blocks are stand-ins for the stakeholders who voted
//! them in, so counting blocks per witness says little about where control
//! sits. This crate implements the full measurement pipeline that makes the
//! two comparable:
//!
//! 1. [`ledger`] — a snapshot model of a DPoS stake ledger: accounts,
//!    balances convertible between stake units, election proxies, witness
//!    votes and power-down schedules, plus the operations that mutate them.
//! 2. [`election`] — proxy-resolved net stake, accumulated vote weight per
//!    stakeholder and per witness, and the 21-member witness schedule
//!    (top-20 by received stake plus one seeded random seat).
//! 3. [`attribution`] — block tallies per generator, and re-allocation of
//!    witness-produced blocks back to the stakeholders whose votes seated
//!    those witnesses.
//! 4. [`metrics`] — normalization, top-r Shannon entropy and distribution
//!    statistics for comparing generator distributions across chains.
//! 5. [`ingest`] — file formats (JSON snapshots, CSV block streams),
//!    streaming loaders, and built-in reference datasets.
//!
//! All computations are pure functions over immutable snapshots; anything
//! random is driven by an explicit seed.

pub mod attribution;
pub mod election;
pub mod error;
pub mod ingest;
pub mod ledger;
pub mod metrics;

pub use attribution::{
    count_block_stream, count_blocks, largest_remainder_round, reallocate, AllocationMode,
    AllocationResult, BlockRecord, GeneratorCounts,
};
pub use election::{
    effective_votes, elect, rank, resolve_net_vests, stakeholder_power, witness_power,
    NetVestsTable, PowerBasis, PowerTable, WitnessSchedule, DEFAULT_PROXY_DEPTH, MAX_PROXY_DEPTH,
    TOP_SEATS, WITNESS_GROUP_SIZE,
};
pub use error::{Error, Result, Violation};
pub use ingest::{
    fixtures::{fixture_names, load_fixture, Fixture},
    load_blocks, load_snapshot, save_snapshot, ChainSource, FileSource,
};
pub use ledger::{
    advance_week, apply_operation, to_vests, Account, AccountId, ConversionRates, LedgerSnapshot,
    OperationRecord, PowerDownSchedule, StakeUnit, Vests, MAX_WITNESS_VOTES, POWER_DOWN_WEEKS,
};
pub use metrics::{
    compare, distribution_stats, normalize, shannon_entropy, ComparisonReport, DistStats,
    Distribution, EntropyReport, EntropyRow, NormalizedSeries,
};
