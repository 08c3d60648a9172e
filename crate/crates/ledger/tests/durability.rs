mod common;

use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use common::{day, login, Fixtures};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use tt_ledger::{Ledger, LedgerError};

/// Applies one random operation. Rejections are part of the mix; they must
/// leave no trace in the journal.
fn random_op(l: &mut Ledger, f: &Fixtures, rng: &mut ChaCha20Rng) {
    let _ = match rng.gen_range(0..7) {
        0 | 1 => l.append_comment(&f.comments[rng.gen_range(0..f.comments.len())]).map(drop),
        2 => l.append_genesis(&f.genesis[rng.gen_range(0..f.genesis.len())]).map(drop),
        3 => {
            let c = &f.credentials[rng.gen_range(0..f.credentials.len())];
            l.put_credential(&login(rng.gen_range(0..4)), 1, c).map(drop)
        }
        4 => {
            let u = &f.updates[rng.gen_range(0..f.updates.len())];
            l.put_update_message(&login(rng.gen_range(0..4)), u).map(drop)
        }
        5 => {
            let nym = &f.nyms[rng.gen_range(0..f.nyms.len())];
            l.register_nym(day(rng.gen_range(0..45)), nym).map(drop)
        }
        _ => {
            if rng.gen_bool(0.5) {
                let k = rng.gen_range(0..f.issuer_keys.len());
                l.announce_epoch(k as u64 + 1, &f.issuer_keys[k]).map(drop)
            } else {
                l.purge(day(rng.gen_range(0..80))).map(drop)
            }
        }
    };
}

#[test]
fn replay_reconstructs_identical_state() {
    let f = Fixtures::build(2);
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for trial in 0..100 {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal");
        let time = Arc::new(AtomicI64::new(1_700_000_000));
        let clock = {
            let time = time.clone();
            Arc::new(move || time.fetch_add(7, Ordering::Relaxed))
        };
        let mut live = Ledger::open(&path).unwrap().with_clock(clock);
        let ops = rng.gen_range(1..60);
        for _ in 0..ops {
            random_op(&mut live, &f, &mut rng);
        }
        let state = live.state_bytes();
        let chain: Vec<_> = live.entries().iter().map(|e| e.digest).collect();
        // Simulated crash: no destructor, nothing beyond what was synced.
        std::mem::forget(live);

        let replayed = Ledger::open(&path).unwrap();
        assert_eq!(replayed.state_bytes(), state, "trial {trial}");
        let replayed_chain: Vec<_> = replayed.entries().iter().map(|e| e.digest).collect();
        assert_eq!(replayed_chain, chain, "trial {trial}");
        assert!(replayed.verify_chain());
    }
}

#[test]
fn torn_tail_rolls_back_to_the_last_complete_operation() {
    let f = Fixtures::build(4);
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for trial in 0..20 {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal");
        let mut live = Ledger::open(&path).unwrap();
        let mut states = vec![(0u64, live.state_bytes())];
        for _ in 0..rng.gen_range(2..30) {
            random_op(&mut live, &f, &mut rng);
            let len = std::fs::metadata(&path).unwrap().len();
            if states.last().unwrap().0 != len {
                states.push((len, live.state_bytes()));
            }
        }
        drop(live);
        if states.len() < 2 {
            continue;
        }
        let (prev_len, prev_state) = &states[states.len() - 2];
        let (full_len, _) = states.last().unwrap();
        let cut = rng.gen_range(*prev_len..*full_len);
        let file = std::fs::OpenOptions::new().write(true).open(&path).unwrap();
        file.set_len(cut).unwrap();
        drop(file);

        let recovered = Ledger::open(&path).unwrap();
        assert_eq!(&recovered.state_bytes(), prev_state, "trial {trial}");
        assert_eq!(std::fs::metadata(&path).unwrap().len(), *prev_len);
    }
}

#[test]
fn committed_prefix_never_changes() {
    let f = Fixtures::build(6);
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut l = Ledger::in_memory();
    let mut seen = Vec::new();
    for _ in 0..200 {
        random_op(&mut l, &f, &mut rng);
        let now: Vec<_> = l.entries().iter().map(|e| e.digest).collect();
        assert_eq!(&now[..seen.len()], seen.as_slice());
        seen = now;
    }
    assert!(matches!(
        l.announce_epoch(0, &f.issuer_keys[0]),
        Err(LedgerError::NonMonotoneEpoch { .. }) | Err(LedgerError::ValidationFailed(_))
    ));
}
