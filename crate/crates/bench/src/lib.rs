//! Synthetic data generators for benchmarks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stakescope::{Account, BlockRecord, ConversionRates, LedgerSnapshot};

/// A snapshot with `accounts` stakeholders: roughly 30% delegate to a
/// random proxy, the rest vote for up to 30 of the first 50 witness
/// candidates.
pub fn synthetic_snapshot(accounts: usize, seed: u64) -> LedgerSnapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut snapshot = LedgerSnapshot::new(0, ConversionRates::default());
    let witnesses = 50.min(accounts.max(1));
    for i in 0..witnesses {
        snapshot.insert(Account::new(format!("w{i:03}")).as_witness());
    }
    for i in 0..accounts {
        let mut account = Account::new(format!("a{i:06}")).with_vests(rng.random::<f64>() * 1e10);
        if rng.random::<f64>() < 0.3 {
            account.proxy = Some(format!("a{:06}", rng.random::<u64>() as usize % accounts));
        } else {
            let votes = rng.random::<u64>() % 31;
            account.witness_votes = (0..votes)
                .map(|_| format!("w{:03}", rng.random::<u64>() as usize % witnesses))
                .collect();
        }
        snapshot.insert(account);
    }
    snapshot
}

/// `n` blocks produced round-robin by `generators` distinct producers.
pub fn synthetic_blocks(n: u64, generators: usize, seed: u64) -> Vec<BlockRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|height| {
            let g = rng.random::<u64>() as usize % generators.max(1);
            BlockRecord::new(height, format!("w{g:03}"))
        })
        .collect()
}
