#![allow(dead_code)]

use std::sync::Arc;

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ark_bn254::G1Affine;
use tt_core::daa::{self, Credential, IssuerPublicKey, MemberSecretKey, UpdateMessage};
use tt_core::primitives::{hash, pke_keygen, sig_keygen, Digest, SigKeyPair};
use tt_core::scheme::{
    self, attest_genesis, comment, encrypt_for_ledger, genesis_nym, make_basename, BillingKey,
    CommentEntry, GenesisTuple,
};
use tt_ledger::Clock;

/// Pre-built ledger payloads; building them is the slow part of every test.
pub struct Fixtures {
    pub comments: Vec<CommentEntry>,
    pub genesis: Vec<GenesisTuple>,
    pub verifiers: Vec<SigKeyPair>,
    pub credentials: Vec<Credential>,
    pub updates: Vec<UpdateMessage>,
    pub issuer_keys: Vec<IssuerPublicKey>,
    pub nyms: Vec<G1Affine>,
}

pub fn day(d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, 1).unwrap() + chrono::Days::new(d as u64)
}

pub fn login(i: u64) -> Digest {
    hash([b"login".as_slice(), &i.to_be_bytes()])
}

pub fn fixed_clock(t: i64) -> Clock {
    Arc::new(move || t)
}

impl Fixtures {
    pub fn build(seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let params = scheme::setup(128).unwrap();
        let issuer_keys: Vec<_> = (1..=4)
            .map(|e| daa::setup2(&params.gpk1, e, &mut rng))
            .collect();
        let (pk, isk) = &issuer_keys[0];
        let billing = pke_keygen(&mut rng);
        let key = BillingKey { pk: billing.public, period: 1 };
        let verifiers: Vec<_> = (0..2).map(|_| sig_keygen(&mut rng)).collect();

        let mut comments = Vec::new();
        let mut genesis = Vec::new();
        let mut credentials = Vec::new();
        let mut updates = Vec::new();
        let mut nyms = Vec::new();
        for u in 0..3u32 {
            let sk = MemberSecretKey::random(&mut rng);
            let com = daa::join(&params.gpk1, &sk, b"n", &mut rng).unwrap();
            let cred = daa::issue(pk, isk, &com, &mut rng).unwrap();
            genesis.push(attest_genesis(
                &verifiers[(u % 2) as usize].signing_key,
                &genesis_nym(&sk),
            ));
            updates.push(daa::user_update_msg(&params.gpk1, &sk, &mut rng).unwrap());
            for d in [0u32, 40] {
                let dom = make_basename(day(d), 1);
                let (nym, rec) = comment(pk, &sk, &cred, &dom, b"hello", &mut rng).unwrap();
                let r: [u8; 32] = rng.gen();
                comments.push(CommentEntry {
                    ciphertext: encrypt_for_ledger(&key, &rec, &r),
                    m_digest: rec.m_digest,
                    website: "w".into(),
                    dom,
                    billing_period: 1,
                });
                nyms.push(nym);
            }
            credentials.push(cred);
        }
        Fixtures {
            comments,
            genesis,
            verifiers,
            credentials,
            updates,
            issuer_keys: issuer_keys.into_iter().map(|(pk, _)| pk).collect(),
            nyms,
        }
    }
}
