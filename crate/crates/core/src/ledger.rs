//! Domain model of a DPoS stake ledger.
//!
//! A [`LedgerSnapshot`] is a point-in-time account table: stake balances,
//! election proxies, witness votes and power-down schedules. Snapshots are
//! immutable values; [`apply_operation`] and [`advance_week`] return fresh
//! snapshots instead of mutating in place, so any snapshot can be shared
//! across threads freely.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub type AccountId = String;

/// Stake expressed in VESTS, the base unit all other units convert into.
pub type Vests = f64;

/// Maximum number of distinct witnesses one account may vote for.
pub const MAX_WITNESS_VOTES: usize = 30;

/// A power-down pays out in this many equal weekly portions.
pub const POWER_DOWN_WEEKS: u32 = 13;

/// Relative tolerance for comparing VESTS values that went through
/// floating-point arithmetic.
pub const VESTS_REL_TOLERANCE: f64 = 1e-9;

/// Exchange ratios between the stake units.
///
/// The defaults mirror the commonly quoted approximations:
/// 1 SBD ≈ 0.4 STEEM, 1 STEEM = 1 SP, 1 SP ≈ 2000 VESTS. They are
/// configurable because the ratios drift with market conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionRates {
    pub steem_per_sbd: f64,
    pub sp_per_steem: f64,
    pub vests_per_sp: f64,
}

impl Default for ConversionRates {
    fn default() -> Self {
        ConversionRates {
            steem_per_sbd: 0.4,
            sp_per_steem: 1.0,
            vests_per_sp: 2000.0,
        }
    }
}

impl ConversionRates {
    /// Rates with a custom SBD ratio and VESTS-per-SP ratio. The
    /// STEEM/SP ratio is pegged 1:1.
    pub fn new(steem_per_sbd: f64, vests_per_sp: f64) -> Result<Self> {
        let rates = ConversionRates {
            steem_per_sbd,
            sp_per_steem: 1.0,
            vests_per_sp,
        };
        rates.check()?;
        Ok(rates)
    }

    pub fn check(&self) -> Result<()> {
        for (name, value) in [
            ("steem_per_sbd", self.steem_per_sbd),
            ("sp_per_steem", self.sp_per_steem),
            ("vests_per_sp", self.vests_per_sp),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidRates(format!("{name} = {value}")));
            }
        }
        Ok(())
    }
}

/// The units stake can be denominated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum StakeUnit {
    Steem,
    Sbd,
    Sp,
    Vests,
}

impl fmt::Display for StakeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StakeUnit::Steem => "STEEM",
            StakeUnit::Sbd => "SBD",
            StakeUnit::Sp => "SP",
            StakeUnit::Vests => "VESTS",
        };
        f.write_str(s)
    }
}

impl FromStr for StakeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "STEEM" => Ok(StakeUnit::Steem),
            "SBD" => Ok(StakeUnit::Sbd),
            "SP" => Ok(StakeUnit::Sp),
            "VESTS" => Ok(StakeUnit::Vests),
            other => Err(Error::Format {
                path: String::new(),
                message: format!("unknown stake unit `{other}`"),
            }),
        }
    }
}

/// Converts `amount` of `unit` into VESTS. Linear in the amount; VESTS in
/// is VESTS out.
pub fn to_vests(amount: f64, unit: StakeUnit, rates: &ConversionRates) -> Result<Vests> {
    if !amount.is_finite() {
        return Err(Error::NonFiniteAmount(amount));
    }
    if amount < 0.0 {
        return Err(Error::NegativeAmount(amount));
    }
    rates.check()?;
    let vests = match unit {
        StakeUnit::Vests => amount,
        StakeUnit::Sp => amount * rates.vests_per_sp,
        StakeUnit::Steem => amount * rates.sp_per_steem * rates.vests_per_sp,
        StakeUnit::Sbd => amount * rates.steem_per_sbd * rates.sp_per_steem * rates.vests_per_sp,
    };
    Ok(vests)
}

/// An in-flight stake withdrawal: the claimed amount leaves the balance in
/// `POWER_DOWN_WEEKS` equal weekly portions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerDownSchedule {
    pub weekly_portion: Vests,
    pub weeks_remaining: u32,
}

/// One stakeholder: directly owned stake, an optional election proxy, the
/// set of witnesses voted for, an optional withdrawal schedule, and
/// whether the account registered as a block-producer candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub id: AccountId,
    pub pure_vests: Vests,
    pub proxy: Option<AccountId>,
    pub witness_votes: BTreeSet<AccountId>,
    pub power_down: Option<PowerDownSchedule>,
    /// Registered as a witness candidate via a `witness_update` operation.
    pub witness: bool,
}

impl Account {
    pub fn new(id: impl Into<AccountId>) -> Self {
        Account {
            id: id.into(),
            pure_vests: 0.0,
            proxy: None,
            witness_votes: BTreeSet::new(),
            power_down: None,
            witness: false,
        }
    }

    pub fn with_vests(mut self, vests: Vests) -> Self {
        self.pure_vests = vests;
        self
    }

    pub fn with_proxy(mut self, proxy: impl Into<AccountId>) -> Self {
        self.proxy = Some(proxy.into());
        self
    }

    pub fn with_votes<I, S>(mut self, votes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<AccountId>,
    {
        self.witness_votes = votes.into_iter().map(Into::into).collect();
        self
    }

    pub fn as_witness(mut self) -> Self {
        self.witness = true;
        self
    }
}

/// Point-in-time state of the ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub block_height: u64,
    pub accounts: BTreeMap<AccountId, Account>,
    pub rates: ConversionRates,
}

impl LedgerSnapshot {
    pub fn new(block_height: u64, rates: ConversionRates) -> Self {
        LedgerSnapshot {
            block_height,
            accounts: BTreeMap::new(),
            rates,
        }
    }

    /// Inserts or replaces an account, keyed by its id.
    pub fn insert(&mut self, account: Account) {
        self.accounts.insert(account.id.clone(), account);
    }

    pub fn with_account(mut self, account: Account) -> Self {
        self.insert(account);
        self
    }

    pub fn account(&self, id: &str) -> Option<&Account> {
        self.accounts.get(id)
    }

    pub fn total_pure_vests(&self) -> Vests {
        self.accounts.values().map(|a| a.pure_vests).sum()
    }

    /// Ids of accounts registered as witness candidates, in id order.
    pub fn witness_candidates(&self) -> impl Iterator<Item = &AccountId> {
        self.accounts.values().filter(|a| a.witness).map(|a| &a.id)
    }

    /// Checks every type invariant and returns the violations found. An
    /// empty list means the snapshot is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if let Err(Error::InvalidRates(detail)) = self.rates.check() {
            violations.push(Violation::BadRates { detail });
        }
        for account in self.accounts.values() {
            if !(account.pure_vests.is_finite() && account.pure_vests >= 0.0) {
                violations.push(Violation::BadStake {
                    account: account.id.clone(),
                    value: account.pure_vests,
                });
            }
            if account.witness_votes.len() > MAX_WITNESS_VOTES {
                violations.push(Violation::VoteLimitExceeded {
                    account: account.id.clone(),
                    count: account.witness_votes.len(),
                });
            }
            if let Some(proxy) = &account.proxy {
                if proxy == &account.id {
                    violations.push(Violation::SelfProxy {
                        account: account.id.clone(),
                    });
                } else if !self.accounts.contains_key(proxy) {
                    violations.push(Violation::DanglingProxy {
                        account: account.id.clone(),
                        target: proxy.clone(),
                    });
                }
            }
            for witness in &account.witness_votes {
                if !self.accounts.contains_key(witness) {
                    violations.push(Violation::DanglingVote {
                        account: account.id.clone(),
                        witness: witness.clone(),
                    });
                }
            }
            if let Some(schedule) = &account.power_down {
                if schedule.weeks_remaining > POWER_DOWN_WEEKS {
                    violations.push(Violation::BadPowerDown {
                        account: account.id.clone(),
                        detail: format!("weeks_remaining = {}", schedule.weeks_remaining),
                    });
                }
                if !(schedule.weekly_portion.is_finite() && schedule.weekly_portion >= 0.0) {
                    violations.push(Violation::BadPowerDown {
                        account: account.id.clone(),
                        detail: format!("weekly_portion = {}", schedule.weekly_portion),
                    });
                }
            }
        }
        violations
    }
}

/// A single stake-governance operation, as recorded on chain.
///
/// Field presence is enforced per kind: votes carry a witness target,
/// proxy changes carry the proxy id, power-downs carry an amount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperationRecord {
    WitnessVote {
        actor: AccountId,
        witness: AccountId,
    },
    WitnessUnvote {
        actor: AccountId,
        witness: AccountId,
    },
    WitnessProxy {
        actor: AccountId,
        proxy: AccountId,
    },
    WitnessProxyClear {
        actor: AccountId,
    },
    WitnessUpdate {
        actor: AccountId,
    },
    PowerDownStart {
        actor: AccountId,
        amount: f64,
        unit: StakeUnit,
    },
}

impl OperationRecord {
    pub fn actor(&self) -> &AccountId {
        match self {
            OperationRecord::WitnessVote { actor, .. }
            | OperationRecord::WitnessUnvote { actor, .. }
            | OperationRecord::WitnessProxy { actor, .. }
            | OperationRecord::WitnessProxyClear { actor }
            | OperationRecord::WitnessUpdate { actor }
            | OperationRecord::PowerDownStart { actor, .. } => actor,
        }
    }
}

/// Applies one operation and returns the resulting snapshot. The input
/// snapshot is left untouched.
///
/// Re-voting an already-voted witness is a no-op; the 31st distinct vote
/// is an error. Setting a proxy does not clear the account's direct votes;
/// they are simply ignored downstream while the proxy is set.
pub fn apply_operation(snapshot: &LedgerSnapshot, op: &OperationRecord) -> Result<LedgerSnapshot> {
    let mut next = snapshot.clone();
    let actor_id = op.actor().clone();
    let account = next
        .accounts
        .get_mut(&actor_id)
        .ok_or_else(|| Error::MissingAccount(actor_id.clone()))?;

    match op {
        OperationRecord::WitnessVote { witness, .. } => {
            if !account.witness_votes.contains(witness)
                && account.witness_votes.len() >= MAX_WITNESS_VOTES
            {
                return Err(Error::VoteLimit {
                    account: actor_id,
                    witness: witness.clone(),
                    limit: MAX_WITNESS_VOTES,
                });
            }
            account.witness_votes.insert(witness.clone());
        }
        OperationRecord::WitnessUnvote { witness, .. } => {
            account.witness_votes.remove(witness);
        }
        OperationRecord::WitnessProxy { proxy, .. } => {
            if proxy == &actor_id {
                return Err(Error::SelfProxy(actor_id));
            }
            account.proxy = Some(proxy.clone());
        }
        OperationRecord::WitnessProxyClear { .. } => {
            account.proxy = None;
        }
        OperationRecord::WitnessUpdate { .. } => {
            account.witness = true;
        }
        OperationRecord::PowerDownStart { amount, unit, .. } => {
            let claimed = to_vests(*amount, *unit, &snapshot.rates)?;
            account.power_down = Some(PowerDownSchedule {
                weekly_portion: claimed / POWER_DOWN_WEEKS as f64,
                weeks_remaining: POWER_DOWN_WEEKS,
            });
        }
    }
    Ok(next)
}

/// Advances every active power-down schedule by one week.
///
/// Each scheduled account loses its weekly portion (floored at zero — a
/// floor event is reported as a [`Violation::PowerDownOverdraw`] warning)
/// and schedules that reach zero remaining weeks are removed. Accounts
/// without a schedule are untouched.
pub fn advance_week(snapshot: &LedgerSnapshot) -> (LedgerSnapshot, Vec<Violation>) {
    let mut next = snapshot.clone();
    let mut warnings = Vec::new();
    for account in next.accounts.values_mut() {
        let Some(schedule) = account.power_down else {
            continue;
        };
        if schedule.weeks_remaining == 0 {
            account.power_down = None;
            continue;
        }
        let remaining = account.pure_vests - schedule.weekly_portion;
        if remaining < 0.0 {
            warnings.push(Violation::PowerDownOverdraw {
                account: account.id.clone(),
            });
            account.pure_vests = 0.0;
        } else {
            account.pure_vests = remaining;
        }
        let weeks_remaining = schedule.weeks_remaining - 1;
        account.power_down = if weeks_remaining == 0 {
            None
        } else {
            Some(PowerDownSchedule {
                weekly_portion: schedule.weekly_portion,
                weeks_remaining,
            })
        };
    }
    (next, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snapshot_with(accounts: Vec<Account>) -> LedgerSnapshot {
        let mut snapshot = LedgerSnapshot::new(0, ConversionRates::default());
        for account in accounts {
            snapshot.insert(account);
        }
        snapshot
    }

    #[test]
    fn steem_converts_through_sp_to_vests() {
        let rates = ConversionRates::default();
        let vests = to_vests(13.0, StakeUnit::Steem, &rates).unwrap();
        assert_eq!(vests, 26_000.0);
    }

    #[test]
    fn sbd_converts_at_point_four_steem() {
        let rates = ConversionRates::default();
        let vests = to_vests(1.0, StakeUnit::Sbd, &rates).unwrap();
        assert_eq!(vests, 800.0);
    }

    #[test]
    fn zero_amount_is_zero_in_any_unit() {
        let rates = ConversionRates::default();
        for unit in [
            StakeUnit::Steem,
            StakeUnit::Sbd,
            StakeUnit::Sp,
            StakeUnit::Vests,
        ] {
            assert_eq!(to_vests(0.0, unit, &rates).unwrap(), 0.0);
        }
    }

    #[test]
    fn vests_input_is_identity() {
        let rates = ConversionRates::default();
        assert_eq!(to_vests(123.5, StakeUnit::Vests, &rates).unwrap(), 123.5);
    }

    #[test]
    fn negative_and_non_finite_amounts_are_rejected() {
        let rates = ConversionRates::default();
        assert!(matches!(
            to_vests(-1.0, StakeUnit::Steem, &rates),
            Err(Error::NegativeAmount(_))
        ));
        assert!(matches!(
            to_vests(f64::NAN, StakeUnit::Steem, &rates),
            Err(Error::NonFiniteAmount(_))
        ));
        assert!(matches!(
            to_vests(f64::INFINITY, StakeUnit::Sp, &rates),
            Err(Error::NonFiniteAmount(_))
        ));
    }

    #[test]
    fn bad_rates_are_rejected() {
        assert!(ConversionRates::new(0.0, 2000.0).is_err());
        assert!(ConversionRates::new(0.4, f64::NAN).is_err());
        assert!(ConversionRates::new(-0.4, 2000.0).is_err());
    }

    #[test]
    fn witness_vote_is_idempotent() {
        let snapshot = snapshot_with(vec![Account::new("alice"), Account::new("w")]);
        let vote = OperationRecord::WitnessVote {
            actor: "alice".into(),
            witness: "w".into(),
        };
        let once = apply_operation(&snapshot, &vote).unwrap();
        let twice = apply_operation(&once, &vote).unwrap();
        assert_eq!(twice.account("alice").unwrap().witness_votes.len(), 1);
        assert_eq!(once, twice);
    }

    #[test]
    fn thirty_first_vote_is_rejected() {
        let witnesses: Vec<String> = (0..30).map(|i| format!("w{i:02}")).collect();
        let mut accounts = vec![Account::new("alice").with_votes(witnesses)];
        accounts.extend((0..31).map(|i| Account::new(format!("w{i:02}"))));
        let snapshot = snapshot_with(accounts);
        let vote = OperationRecord::WitnessVote {
            actor: "alice".into(),
            witness: "w30".into(),
        };
        assert!(matches!(
            apply_operation(&snapshot, &vote),
            Err(Error::VoteLimit { .. })
        ));
        // Re-voting an existing witness still works at the cap.
        let revote = OperationRecord::WitnessVote {
            actor: "alice".into(),
            witness: "w00".into(),
        };
        assert!(apply_operation(&snapshot, &revote).is_ok());
    }

    #[test]
    fn proxy_set_and_clear() {
        let snapshot = snapshot_with(vec![Account::new("alice"), Account::new("bob")]);
        let set = OperationRecord::WitnessProxy {
            actor: "alice".into(),
            proxy: "bob".into(),
        };
        let with_proxy = apply_operation(&snapshot, &set).unwrap();
        assert_eq!(
            with_proxy.account("alice").unwrap().proxy.as_deref(),
            Some("bob")
        );

        let clear = OperationRecord::WitnessProxyClear {
            actor: "alice".into(),
        };
        let cleared = apply_operation(&with_proxy, &clear).unwrap();
        assert_eq!(cleared.account("alice").unwrap().proxy, None);
    }

    #[test]
    fn self_proxy_is_rejected() {
        let snapshot = snapshot_with(vec![Account::new("alice")]);
        let op = OperationRecord::WitnessProxy {
            actor: "alice".into(),
            proxy: "alice".into(),
        };
        assert!(matches!(
            apply_operation(&snapshot, &op),
            Err(Error::SelfProxy(_))
        ));
    }

    #[test]
    fn unknown_actor_is_rejected() {
        let snapshot = snapshot_with(vec![]);
        let op = OperationRecord::WitnessUpdate {
            actor: "ghost".into(),
        };
        assert!(matches!(
            apply_operation(&snapshot, &op),
            Err(Error::MissingAccount(_))
        ));
    }

    #[test]
    fn power_down_start_installs_thirteen_week_schedule() {
        let snapshot = snapshot_with(vec![Account::new("alice").with_vests(26_000.0)]);
        let op = OperationRecord::PowerDownStart {
            actor: "alice".into(),
            amount: 13.0,
            unit: StakeUnit::Steem,
        };
        let next = apply_operation(&snapshot, &op).unwrap();
        let schedule = next.account("alice").unwrap().power_down.unwrap();
        assert_eq!(schedule.weekly_portion, 2_000.0);
        assert_eq!(schedule.weeks_remaining, 13);
    }

    #[test]
    fn advance_week_decrements_balance_and_schedule() {
        let snapshot = snapshot_with(vec![Account::new("alice").with_vests(26_000.0)]);
        let start = OperationRecord::PowerDownStart {
            actor: "alice".into(),
            amount: 13.0,
            unit: StakeUnit::Steem,
        };
        let scheduled = apply_operation(&snapshot, &start).unwrap();
        let (after, warnings) = advance_week(&scheduled);
        assert!(warnings.is_empty());
        let alice = after.account("alice").unwrap();
        assert_eq!(alice.pure_vests, 24_000.0);
        assert_eq!(
            alice.power_down,
            Some(PowerDownSchedule {
                weekly_portion: 2_000.0,
                weeks_remaining: 12,
            })
        );
    }

    #[test]
    fn advance_week_without_schedules_is_identity() {
        let snapshot = snapshot_with(vec![Account::new("alice").with_vests(50.0)]);
        let (after, warnings) = advance_week(&snapshot);
        assert_eq!(after, snapshot);
        assert!(warnings.is_empty());
    }

    #[test]
    fn completed_power_down_removes_exactly_the_claimed_amount() {
        // Loop oracle: thirteen weekly portions must sum to the claim.
        let initial = 90_000.0;
        let claimed_steem = 13.0;
        let snapshot = snapshot_with(vec![Account::new("alice").with_vests(initial)]);
        let start = OperationRecord::PowerDownStart {
            actor: "alice".into(),
            amount: claimed_steem,
            unit: StakeUnit::Steem,
        };
        let mut state = apply_operation(&snapshot, &start).unwrap();
        let portion = state
            .account("alice")
            .unwrap()
            .power_down
            .unwrap()
            .weekly_portion;
        let mut withdrawn_oracle = 0.0;
        for _ in 0..13 {
            withdrawn_oracle += portion;
            state = advance_week(&state).0;
        }
        let alice = state.account("alice").unwrap();
        assert!(alice.power_down.is_none());
        let expected = initial - withdrawn_oracle;
        assert!((alice.pure_vests - expected).abs() <= expected.abs() * VESTS_REL_TOLERANCE);
        assert!((withdrawn_oracle - 26_000.0).abs() <= 26_000.0 * VESTS_REL_TOLERANCE);
    }

    #[test]
    fn overdraw_floors_at_zero_with_warning() {
        let mut account = Account::new("alice").with_vests(1_000.0);
        account.power_down = Some(PowerDownSchedule {
            weekly_portion: 1_500.0,
            weeks_remaining: 2,
        });
        let snapshot = snapshot_with(vec![account]);
        let (after, warnings) = advance_week(&snapshot);
        assert_eq!(after.account("alice").unwrap().pure_vests, 0.0);
        assert_eq!(
            warnings,
            vec![Violation::PowerDownOverdraw {
                account: "alice".into()
            }]
        );
    }

    #[test]
    fn validate_flags_vote_limit_breach() {
        let witnesses: Vec<String> = (0..31).map(|i| format!("w{i:02}")).collect();
        let mut accounts = vec![Account::new("alice").with_votes(witnesses.clone())];
        accounts.extend(witnesses.into_iter().map(Account::new));
        let snapshot = snapshot_with(accounts);
        let violations = snapshot.validate();
        assert_eq!(
            violations,
            vec![Violation::VoteLimitExceeded {
                account: "alice".into(),
                count: 31,
            }]
        );
    }

    #[test]
    fn validate_flags_dangling_proxy_and_vote() {
        let snapshot = snapshot_with(vec![
            Account::new("alice").with_proxy("ghost"),
            Account::new("bob").with_votes(["nobody"]),
        ]);
        let violations = snapshot.validate();
        assert!(violations.contains(&Violation::DanglingProxy {
            account: "alice".into(),
            target: "ghost".into(),
        }));
        assert!(violations.contains(&Violation::DanglingVote {
            account: "bob".into(),
            witness: "nobody".into(),
        }));
    }

    #[test]
    fn validate_passes_well_formed_snapshot() {
        let snapshot = snapshot_with(vec![
            Account::new("w1").as_witness(),
            Account::new("alice").with_vests(100.0).with_votes(["w1"]),
            Account::new("bob").with_vests(50.0).with_proxy("alice"),
        ]);
        assert!(snapshot.validate().is_empty());
    }

    #[test]
    fn snapshots_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<LedgerSnapshot>();
        assert_send_sync::<Account>();
        assert_send_sync::<OperationRecord>();
    }

    #[test]
    fn apply_operation_leaves_input_untouched() {
        let snapshot = snapshot_with(vec![Account::new("alice"), Account::new("bob")]);
        let before = snapshot.clone();
        let op = OperationRecord::WitnessProxy {
            actor: "alice".into(),
            proxy: "bob".into(),
        };
        let _ = apply_operation(&snapshot, &op).unwrap();
        assert_eq!(snapshot, before);
    }
}
