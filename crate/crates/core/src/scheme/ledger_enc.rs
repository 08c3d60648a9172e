use std::convert::Infallible;

use ark_bn254::G1Affine;
use chrono::NaiveDate;

use super::basename::{make_basename, Basename};
use super::comment::{CommentRecord, ExtendedProof};
use super::params::SchemeError;
use crate::daa::{nym_gen, DaaSignature, MemberSecretKey};
use crate::primitives::{pke_decrypt, pke_encrypt, BoxPublicKey, BoxSecretKey, Ciphertext, Digest};
use crate::wire::{Reader, WireError, Writer};

const VERSION: u8 = 1;

/// Encryption key shared by all websites paying for billing period `period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BillingKey {
    pub pk: BoxPublicKey,
    pub period: u64,
}

/// Decrypted ledger payload: `(sigma, nym)` plus the extended-mode proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerPayload {
    pub sigma: DaaSignature,
    pub nym: G1Affine,
    pub proof: Option<ExtendedProof>,
}

impl LedgerPayload {
    fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(VERSION);
        w.g1(&self.nym).bytes(&self.sigma.to_bytes());
        match &self.proof {
            None => w.u8(0),
            Some(p) => w.u8(1).bytes(&p.to_bytes()),
        };
        w.finish()
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let nym = r.g1_nonzero()?;
        let sigma = DaaSignature::from_bytes(r.bytes()?)?;
        let proof = match r.u8()? {
            0 => None,
            1 => Some(ExtendedProof::from_bytes(r.bytes()?)?),
            _ => return Err(WireError::Invalid("proof flag").into()),
        };
        r.finish()?;
        Ok(LedgerPayload { sigma, nym, proof })
    }

    /// Reassembles the comment record using the entry's cleartext fields.
    pub fn into_record(self, dom: Basename, m_digest: Digest) -> CommentRecord {
        CommentRecord {
            sigma: self.sigma,
            nym: self.nym,
            dom,
            m_digest,
            proof: self.proof,
        }
    }
}

/// `{enc(pk_W, (sigma, nym); r), h(m), W, dom}` as stored on the ledger.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommentEntry {
    pub ciphertext: Ciphertext,
    pub m_digest: Digest,
    pub website: String,
    pub dom: Basename,
    pub billing_period: u64,
}

impl CommentEntry {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(VERSION)
            .bytes(&self.dom.to_bytes())
            .bytes(&self.m_digest.0)
            .bytes(self.website.as_bytes())
            .u64(self.billing_period)
            .bytes(&self.ciphertext.0)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let dom = Basename::from_bytes(r.bytes()?).map_err(|_| WireError::Invalid("basename"))?;
        let m_digest = Digest(r.array()?);
        let website = std::str::from_utf8(r.bytes()?)
            .map_err(|_| WireError::Invalid("website id"))?
            .to_owned();
        let billing_period = r.u64()?;
        let ciphertext = Ciphertext(r.bytes()?.to_vec());
        r.finish()?;
        Ok(CommentEntry {
            ciphertext,
            m_digest,
            website,
            dom,
            billing_period,
        })
    }
}

/// Encrypts the private part of a comment; deterministic given `r`.
pub fn encrypt_for_ledger(key: &BillingKey, record: &CommentRecord, r: &[u8; 32]) -> Ciphertext {
    let payload = LedgerPayload {
        sigma: record.sigma.clone(),
        nym: record.nym,
        proof: record.proof.clone(),
    };
    pke_encrypt(&key.pk, &payload.to_bytes(), r)
}

pub fn decrypt_entry(sk: &BoxSecretKey, c: &Ciphertext) -> Result<LedgerPayload, SchemeError> {
    LedgerPayload::from_bytes(&pke_decrypt(sk, c)?)
}

/// Read access to pseudonym occurrence counts.
pub trait NymLookup {
    type Error;

    fn nym_count(&self, nym: &G1Affine) -> Result<u64, Self::Error>;
}

/// Atomic first-use registration of pseudonyms.
pub trait NymRegistry {
    type Error;

    /// Returns true if `nym` had not been registered in its period before.
    fn register_nym(&self, nym: &G1Affine) -> Result<bool, Self::Error>;
}

impl<F: Fn(&G1Affine) -> u64> NymLookup for F {
    type Error = Infallible;

    fn nym_count(&self, nym: &G1Affine) -> Result<u64, Infallible> {
        Ok(self(nym))
    }
}

/// Largest `seq` already used on `date`, found by bisection.
///
/// Assumes sequence numbers were used contiguously from 1, which
/// [`next_basename`] guarantees.
pub fn recover_last_seq<L: NymLookup>(
    sk: &MemberSecretKey,
    date: NaiveDate,
    tau: u32,
    ledger: &L,
) -> Result<u32, L::Error> {
    let used = |seq: u32| -> Result<bool, L::Error> {
        let dom = make_basename(date, seq);
        Ok(ledger.nym_count(&nym_gen(sk, &dom.to_bytes()))? > 0)
    };
    let (mut lo, mut hi) = (0u32, tau);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if used(mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// The next unused basename for today, or `None` once all `tau` are spent.
pub fn next_basename<L: NymLookup>(
    sk: &MemberSecretKey,
    today: NaiveDate,
    tau: u32,
    ledger: &L,
) -> Result<Option<Basename>, L::Error> {
    let last = recover_last_seq(sk, today, tau, ledger)?;
    Ok((last < tau).then(|| make_basename(today, last + 1)))
}
