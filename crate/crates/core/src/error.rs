//! Error and violation types shared across the crate.

use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by ledger operations, election math, attribution and
/// the file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("amount must be non-negative, got {0}")]
    NegativeAmount(f64),

    #[error("amount must be finite, got {0}")]
    NonFiniteAmount(f64),

    #[error("conversion rates must be strictly positive and finite ({0})")]
    InvalidRates(String),

    #[error("account `{0}` not found in snapshot")]
    MissingAccount(String),

    #[error("account `{account}` already votes for {limit} witnesses; cannot add `{witness}`")]
    VoteLimit {
        account: String,
        witness: String,
        limit: usize,
    },

    #[error("account `{0}` cannot set itself as proxy")]
    SelfProxy(String),

    #[error("snapshot failed validation: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("witness election needs at least {need} registered candidates, snapshot has {have}")]
    InsufficientCandidates { have: usize, need: usize },

    #[error("proxy depth must be between 1 and {max}, got {got}")]
    InvalidProxyDepth { got: usize, max: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("rank {r} is out of range for a distribution of {len} entries ({label})")]
    RankOutOfRange { label: String, r: usize, len: usize },

    #[error("duplicate block height {0}")]
    DuplicateHeight(u64),

    #[error("{path}: row {row}: {message}")]
    MalformedRow {
        path: String,
        row: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: String, message: String },

    #[error("unknown fixture `{name}`; available: {}", available.join(", "))]
    UnknownFixture {
        name: String,
        available: Vec<&'static str>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A single broken snapshot invariant. Violations are data, not
/// exceptions: `validate` collects them and callers decide what is fatal.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// More witness votes than the protocol permits.
    VoteLimitExceeded { account: String, count: usize },
    /// Account lists itself as its own election proxy.
    SelfProxy { account: String },
    /// Proxy target is not present in the snapshot.
    DanglingProxy { account: String, target: String },
    /// Voted witness id is not present in the snapshot.
    DanglingVote { account: String, witness: String },
    /// Stake balance is negative or not finite.
    BadStake { account: String, value: f64 },
    /// Power-down schedule has an out-of-range week count or bad portion.
    BadPowerDown { account: String, detail: String },
    /// A weekly withdrawal exceeded the remaining balance and was floored.
    PowerDownOverdraw { account: String },
    /// Conversion rates are non-positive or non-finite.
    BadRates { detail: String },
}

impl Violation {
    /// Account the violation is attached to, when there is one.
    pub fn account(&self) -> Option<&str> {
        match self {
            Violation::VoteLimitExceeded { account, .. }
            | Violation::SelfProxy { account }
            | Violation::DanglingProxy { account, .. }
            | Violation::DanglingVote { account, .. }
            | Violation::BadStake { account, .. }
            | Violation::BadPowerDown { account, .. }
            | Violation::PowerDownOverdraw { account } => Some(account),
            Violation::BadRates { .. } => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VoteLimitExceeded { account, count } => {
                write!(
                    f,
                    "account `{account}` has {count} witness votes (limit 30)"
                )
            }
            Violation::SelfProxy { account } => {
                write!(f, "account `{account}` proxies to itself")
            }
            Violation::DanglingProxy { account, target } => {
                write!(
                    f,
                    "account `{account}` proxies to unknown account `{target}`"
                )
            }
            Violation::DanglingVote { account, witness } => {
                write!(
                    f,
                    "account `{account}` votes for unknown witness `{witness}`"
                )
            }
            Violation::BadStake { account, value } => {
                write!(f, "account `{account}` has invalid stake {value}")
            }
            Violation::BadPowerDown { account, detail } => {
                write!(
                    f,
                    "account `{account}` has invalid power-down schedule: {detail}"
                )
            }
            Violation::PowerDownOverdraw { account } => {
                write!(
                    f,
                    "account `{account}` power-down portion exceeded balance; floored at 0"
                )
            }
            Violation::BadRates { detail } => write!(f, "invalid conversion rates: {detail}"),
        }
    }
}
