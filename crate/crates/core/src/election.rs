//! Stake-weighted witness election.
//!
//! The pipeline is: resolve proxy chains into net VESTS per account
//! ([`resolve_net_vests`]), turn net VESTS into accumulated vote weight per
//! stakeholder or per witness ([`stakeholder_power`], [`witness_power`]),
//! then seat the 21-member producer group ([`elect`]): the top-20
//! candidates by received stake plus one seeded random seat drawn from the
//! rest.
//!
//! Everything here is a pure function of an immutable snapshot; `elect`
//! keeps its generator state local, so identical seeds give bit-identical
//! schedules.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, Violation};
use crate::ledger::{AccountId, LedgerSnapshot, Vests};

/// Proxy chains are followed one hop by default, matching the common
/// single-hop delegation pattern.
pub const DEFAULT_PROXY_DEPTH: usize = 1;

/// Upper bound on configurable proxy depth (the deployed chain limit).
pub const MAX_PROXY_DEPTH: usize = 4;

/// Number of seats filled strictly by ranking.
pub const TOP_SEATS: usize = 20;

/// Total size of the producer group: top seats plus one random seat.
pub const WITNESS_GROUP_SIZE: usize = 21;

/// Proxy-resolved voting stake per account.
///
/// Accounts that set a proxy hold a zero entry here; their stake is
/// credited to the terminal account of the proxy chain. Stake whose chain
/// exceeded the depth limit or cycled is summed into `unresolved_vests`,
/// so `entries` plus `unresolved_vests` always conserves the snapshot's
/// total pure VESTS.
#[derive(Debug, Clone, PartialEq)]
pub struct NetVestsTable {
    pub entries: BTreeMap<AccountId, Vests>,
    pub unresolved_vests: Vests,
}

impl NetVestsTable {
    /// Net VESTS for `id`; zero when absent.
    pub fn net(&self, id: &str) -> Vests {
        self.entries.get(id).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> Vests {
        self.entries.values().sum()
    }
}

/// Which side of the election a power table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerBasis {
    /// Accumulated VESTS from votes cast: net VESTS × number of votes.
    Stakeholder,
    /// Accumulated VESTS from votes received: sum of voters' net VESTS.
    Witness,
}

/// Accumulated vote weight per account, on either basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub entries: BTreeMap<AccountId, Vests>,
    pub basis: PowerBasis,
}

impl PowerTable {
    pub fn power(&self, id: &str) -> Vests {
        self.entries.get(id).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> Vests {
        self.entries.values().sum()
    }
}

/// The 21-member producer group for one election round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSchedule {
    /// The 20 candidates with the highest received stake, best first.
    pub top20: Vec<AccountId>,
    /// The extra seat drawn from candidates outside the top 20.
    pub random_seat: AccountId,
    /// Seed the random seat was drawn with.
    pub seed: u64,
}

impl WitnessSchedule {
    /// All 21 members: the ranked seats followed by the random seat.
    pub fn members(&self) -> Vec<&AccountId> {
        self.top20.iter().chain(Some(&self.random_seat)).collect()
    }
}

/// Resolves proxy chains and credits every account's stake to the
/// terminal account of its chain, following at most `max_proxy_depth`
/// hops.
///
/// Chains that still point at a proxying account after the depth limit,
/// and chains that cycle, leave their stake in `unresolved_vests` rather
/// than erroring. Dangling proxies violate the precondition and error.
pub fn resolve_net_vests(
    snapshot: &LedgerSnapshot,
    max_proxy_depth: usize,
) -> Result<NetVestsTable> {
    if !(1..=MAX_PROXY_DEPTH).contains(&max_proxy_depth) {
        return Err(Error::InvalidProxyDepth {
            got: max_proxy_depth,
            max: MAX_PROXY_DEPTH,
        });
    }
    let dangling: Vec<Violation> = snapshot
        .validate()
        .into_iter()
        .filter(|v| matches!(v, Violation::DanglingProxy { .. }))
        .collect();
    if !dangling.is_empty() {
        return Err(Error::Validation(dangling));
    }

    let mut entries: BTreeMap<AccountId, Vests> = snapshot
        .accounts
        .keys()
        .map(|id| (id.clone(), 0.0))
        .collect();
    let mut unresolved = 0.0;

    for account in snapshot.accounts.values() {
        let mut current = account;
        let mut visited: HashSet<&str> = HashSet::from([account.id.as_str()]);
        let mut hops = 0;
        loop {
            match &current.proxy {
                None => {
                    *entries.get_mut(&current.id).expect("account key present") +=
                        account.pure_vests;
                    break;
                }
                Some(target) => {
                    if hops == max_proxy_depth || !visited.insert(target.as_str()) {
                        // Depth exhausted while still delegating, or a cycle.
                        unresolved += account.pure_vests;
                        break;
                    }
                    current = snapshot
                        .accounts
                        .get(target)
                        .expect("dangling proxies rejected above");
                    hops += 1;
                }
            }
        }
    }

    Ok(NetVestsTable {
        entries,
        unresolved_vests: unresolved,
    })
}

/// Accumulated VESTS from votes cast: one entry per account that kept its
/// own vote (no proxy) and voted for at least one witness, valued at
/// net VESTS times the number of votes.
pub fn stakeholder_power(snapshot: &LedgerSnapshot, net: &NetVestsTable) -> PowerTable {
    let entries = snapshot
        .accounts
        .values()
        .filter(|a| a.proxy.is_none() && !a.witness_votes.is_empty())
        .map(|a| {
            let power = net.net(&a.id) * a.witness_votes.len() as f64;
            (a.id.clone(), power)
        })
        .collect();
    PowerTable {
        entries,
        basis: PowerBasis::Stakeholder,
    }
}

/// Accumulated VESTS from votes received: one entry per witness candidate
/// or voted account, valued at the sum of its voters' net VESTS. Voters
/// that set a proxy contribute nothing.
pub fn witness_power(snapshot: &LedgerSnapshot, net: &NetVestsTable) -> PowerTable {
    let mut entries: BTreeMap<AccountId, Vests> = snapshot
        .witness_candidates()
        .map(|id| (id.clone(), 0.0))
        .collect();
    for account in snapshot.accounts.values() {
        if account.proxy.is_some() {
            continue;
        }
        let weight = net.net(&account.id);
        for witness in &account.witness_votes {
            *entries.entry(witness.clone()).or_insert(0.0) += weight;
        }
    }
    PowerTable {
        entries,
        basis: PowerBasis::Witness,
    }
}

/// Map of effective voters to their vote sets: accounts that set a proxy
/// are excluded, everything else keeps its direct votes.
pub fn effective_votes(snapshot: &LedgerSnapshot) -> BTreeMap<AccountId, BTreeSet<AccountId>> {
    snapshot
        .accounts
        .values()
        .filter(|a| a.proxy.is_none() && !a.witness_votes.is_empty())
        .map(|a| (a.id.clone(), a.witness_votes.clone()))
        .collect()
}

/// Orders a power table by descending value, ties broken by ascending id.
pub fn rank(power: &PowerTable) -> Vec<(AccountId, Vests)> {
    let mut ranked: Vec<(AccountId, Vests)> = power
        .entries
        .iter()
        .map(|(id, v)| (id.clone(), *v))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Seats the 21-member producer group.
///
/// The top 20 registered candidates by received stake take the ranked
/// seats; the final seat is drawn from the remaining candidates with
/// probability proportional to received stake (uniformly when every
/// remaining candidate has zero), using a ChaCha generator seeded by
/// `seed`. Identical inputs and seed give a bit-identical schedule.
pub fn elect(snapshot: &LedgerSnapshot, net: &NetVestsTable, seed: u64) -> Result<WitnessSchedule> {
    let power = witness_power(snapshot, net);
    let mut candidates: Vec<(AccountId, Vests)> = snapshot
        .witness_candidates()
        .map(|id| (id.clone(), power.power(id)))
        .collect();
    if candidates.len() < WITNESS_GROUP_SIZE {
        return Err(Error::InsufficientCandidates {
            have: candidates.len(),
            need: WITNESS_GROUP_SIZE,
        });
    }
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let rest = candidates.split_off(TOP_SEATS);
    let top20: Vec<AccountId> = candidates.into_iter().map(|(id, _)| id).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_seat = weighted_pick(&rest, &mut rng).clone();

    Ok(WitnessSchedule {
        top20,
        random_seat,
        seed,
    })
}

/// Draws one id with probability proportional to its weight; uniform when
/// all weights are zero. `choices` must be non-empty.
fn weighted_pick<'a>(choices: &'a [(AccountId, Vests)], rng: &mut ChaCha8Rng) -> &'a AccountId {
    debug_assert!(!choices.is_empty());
    let total: f64 = choices.iter().map(|(_, w)| w.max(0.0)).sum();
    let uniform = total <= 0.0;
    let total = if uniform { choices.len() as f64 } else { total };
    let mut target = rng.random::<f64>() * total;
    for (id, weight) in choices {
        let w = if uniform { 1.0 } else { weight.max(0.0) };
        if target < w {
            return id;
        }
        target -= w;
    }
    // Rounding can leave `target` a hair past the last band.
    &choices.last().expect("non-empty choices").0
}
