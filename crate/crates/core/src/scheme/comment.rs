use ark_bn254::G1Affine;
use rand::{CryptoRng, RngCore};

use super::basename::Basename;
use super::genesis::GenesisTuple;
use super::ledger_enc::{encrypt_for_ledger, BillingKey, CommentEntry};
use super::params::{SchemeError, SchemeParams};
use crate::daa::{
    self, nym_extract, verify_bsn, Credential, DaaSignature, IssuerPublicKey, MemberSecretKey,
    RevocationList,
};
use crate::primitives::{hash, Digest};
use crate::wire::{Reader, WireError, Writer};
use crate::zkp::{prove_membership, verify_membership, MembershipProof};

const VERSION: u8 = 1;

/// Which slice of the public genesis list a membership proof was made against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GenesisWindow {
    pub offset: u64,
    pub len: u32,
    /// Unix seconds at which the list was fetched. Recorded, not checked.
    pub queried_at: i64,
}

/// Genesis pseudonyms the prover hides among.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenesisSubset {
    pub window: GenesisWindow,
    pub nyms: Vec<G1Affine>,
}

impl GenesisSubset {
    pub fn from_tuples(offset: u64, queried_at: i64, tuples: &[GenesisTuple]) -> Self {
        GenesisSubset {
            window: GenesisWindow {
                offset,
                len: tuples.len() as u32,
                queried_at,
            },
            nyms: tuples.iter().map(|gb| gb.nym1).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedProof {
    pub window: GenesisWindow,
    pub membership: MembershipProof,
}

impl ExtendedProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(VERSION)
            .u64(self.window.offset)
            .u32(self.window.len)
            .u64(self.window.queried_at as u64)
            .bytes(&self.membership.to_bytes())
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let window = GenesisWindow {
            offset: r.u64()?,
            len: r.u32()?,
            queried_at: r.u64()? as i64,
        };
        let membership = MembershipProof::from_bytes(r.bytes()?)?;
        r.finish()?;
        Ok(ExtendedProof { window, membership })
    }
}

/// `gamma = (sigma, nym, dom, h(m))`, optionally with a membership proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommentRecord {
    pub sigma: DaaSignature,
    pub nym: G1Affine,
    pub dom: Basename,
    pub m_digest: Digest,
    pub proof: Option<ExtendedProof>,
}

impl CommentRecord {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(VERSION);
        w.bytes(&self.dom.to_bytes())
            .g1(&self.nym)
            .bytes(&self.m_digest.0)
            .bytes(&self.sigma.to_bytes());
        match &self.proof {
            None => w.u8(0),
            Some(p) => w.u8(1).bytes(&p.to_bytes()),
        };
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let dom = Basename::from_bytes(r.bytes()?)
            .map_err(|_| WireError::Invalid("basename"))?;
        let nym = r.g1_nonzero()?;
        let m_digest = Digest(r.array()?);
        let sigma = DaaSignature::from_bytes(r.bytes()?)?;
        let proof = match r.u8()? {
            0 => None,
            1 => Some(ExtendedProof::from_bytes(r.bytes()?)?),
            _ => return Err(WireError::Invalid("proof flag").into()),
        };
        r.finish()?;
        Ok(CommentRecord {
            sigma,
            nym,
            dom,
            m_digest,
            proof,
        })
    }
}

fn sign_comment<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    sk: &MemberSecretKey,
    cred: &Credential,
    dom: &Basename,
    m: &[u8],
    rng: &mut R,
) -> Result<CommentRecord, SchemeError> {
    let m_digest = hash([m]);
    let sigma = daa::sign(pk, sk, cred, &dom.to_bytes(), &m_digest.0, rng)?;
    Ok(CommentRecord {
        nym: nym_extract(&sigma),
        sigma,
        dom: *dom,
        m_digest,
        proof: None,
    })
}

/// Base-mode comment.
pub fn comment<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    sk: &MemberSecretKey,
    cred: &Credential,
    dom: &Basename,
    m: &[u8],
    rng: &mut R,
) -> Result<(G1Affine, CommentRecord), SchemeError> {
    let record = sign_comment(pk, sk, cred, dom, m, rng)?;
    Ok((record.nym, record))
}

/// Extended-mode comment, proving membership in `subset`.
#[allow(clippy::too_many_arguments)]
pub fn comment_extended<R: RngCore + CryptoRng>(
    params: &SchemeParams,
    pk: &IssuerPublicKey,
    sk: &MemberSecretKey,
    cred: &Credential,
    dom: &Basename,
    m: &[u8],
    subset: &GenesisSubset,
    rng: &mut R,
) -> Result<(G1Affine, CommentRecord), SchemeError> {
    let mut record = sign_comment(pk, sk, cred, dom, m, rng)?;
    let membership = prove_membership(
        &params.crs,
        &record.nym,
        &dom.to_bytes(),
        &subset.nyms,
        sk,
        rng,
    )?;
    record.proof = Some(ExtendedProof {
        window: subset.window,
        membership,
    });
    Ok((record.nym, record))
}

/// Checks a comment; `genesis` selects extended verification.
pub fn verify_comment(
    params: &SchemeParams,
    pk: &IssuerPublicKey,
    nym: &G1Affine,
    dom: &Basename,
    m: &[u8],
    record: &CommentRecord,
    genesis: Option<&[G1Affine]>,
) -> bool {
    verify_comment_with_rl(params, pk, nym, dom, m, record, genesis, &RevocationList::new())
}

#[allow(clippy::too_many_arguments)]
pub fn verify_comment_with_rl(
    params: &SchemeParams,
    pk: &IssuerPublicKey,
    nym: &G1Affine,
    dom: &Basename,
    m: &[u8],
    record: &CommentRecord,
    genesis: Option<&[G1Affine]>,
    rl: &RevocationList,
) -> bool {
    let dom_bytes = dom.to_bytes();
    if record.dom != *dom
        || record.nym != *nym
        || hash([m]) != record.m_digest
        || nym_extract(&record.sigma) != *nym
        || !verify_bsn(&record.sigma, &dom_bytes)
    {
        return false;
    }
    if let Some(genesis) = genesis {
        let Some(proof) = &record.proof else {
            return false;
        };
        if !verify_membership(&params.crs, nym, &dom_bytes, genesis, &proof.membership) {
            return false;
        }
    }
    daa::verify(pk, &record.m_digest.0, &dom_bytes, &record.sigma, rl)
}

/// Public evidence that a comment should have been published.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evidence {
    pub record: CommentRecord,
    /// Encryption randomness; present when the ledger stores ciphertexts.
    pub r: Option<[u8; 32]>,
    pub m: Vec<u8>,
}

impl Evidence {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(VERSION);
        w.bytes(&self.record.to_bytes());
        match &self.r {
            None => w.u8(0),
            Some(r) => w.u8(1).bytes(r),
        };
        w.bytes(&self.m).finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SchemeError> {
        let mut rd = Reader::versioned(bytes, VERSION)?;
        let record = CommentRecord::from_bytes(rd.bytes()?)?;
        let r = match rd.u8()? {
            0 => None,
            1 => Some(rd.array()?),
            _ => return Err(WireError::Invalid("randomness flag").into()),
        };
        let m = rd.bytes()?.to_vec();
        rd.finish()?;
        Ok(Evidence { record, r, m })
    }
}

pub fn claim(record: &CommentRecord, m: &[u8], r: Option<[u8; 32]>) -> Evidence {
    Evidence {
        record: record.clone(),
        r,
        m: m.to_vec(),
    }
}

/// Accepts a claim for `(dom, m)`. With `ledger`, the revealed randomness
/// must re-encrypt to the stored ciphertext byte for byte.
#[allow(clippy::too_many_arguments)]
pub fn verify_claim(
    params: &SchemeParams,
    pk: &IssuerPublicKey,
    dom: &Basename,
    m: &[u8],
    evidence: &Evidence,
    genesis: Option<&[G1Affine]>,
    ledger: Option<(&BillingKey, &CommentEntry)>,
) -> bool {
    if evidence.m != m {
        return false;
    }
    let record = &evidence.record;
    if !verify_comment(params, pk, &record.nym, dom, m, record, genesis) {
        return false;
    }
    match ledger {
        None => true,
        Some((key, entry)) => {
            let Some(r) = &evidence.r else {
                return false;
            };
            entry.dom == *dom
                && entry.m_digest == record.m_digest
                && entry.billing_period == key.period
                && encrypt_for_ledger(key, record, r) == entry.ciphertext
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{keygen, make_basename, setup};
    use chrono::NaiveDate;
    use rand::thread_rng;

    #[test]
    fn honest_and_mutated() {
        let mut rng = thread_rng();
        let params = setup(128).unwrap();
        let (pk, isk) = keygen(&params, 1, &mut rng);
        let sk = MemberSecretKey::random(&mut rng);
        let com = daa::join(&params.gpk1, &sk, b"n", &mut rng).unwrap();
        let cred = daa::issue(&pk, &isk, &com, &mut rng).unwrap();
        let today = NaiveDate::from_ymd_opt(2024, 5, 1).unwrap();
        let dom = make_basename(today, 1);
        let (nym, rec) = comment(&pk, &sk, &cred, &dom, b"hello", &mut rng).unwrap();
        assert!(verify_comment(&params, &pk, &nym, &dom, b"hello", &rec, None));
        assert!(!verify_comment(&params, &pk, &nym, &dom, b"hell0", &rec, None));
        assert!(!verify_comment(&params, &pk, &nym, &make_basename(today, 2), b"hello", &rec, None));
        assert!(!verify_comment(&params, &pk, &nym, &dom, b"hello", &rec, Some(&[nym])));
        assert_eq!(CommentRecord::from_bytes(&rec.to_bytes()).unwrap(), rec);

        let (nym2, _) = comment(&pk, &sk, &cred, &dom, b"again", &mut rng).unwrap();
        assert_eq!(nym, nym2);

        let ev = claim(&rec, b"hello", None);
        assert!(verify_claim(&params, &pk, &dom, b"hello", &ev, None, None));
        assert!(!verify_claim(&params, &pk, &dom, b"other", &ev, None, None));
        assert_eq!(Evidence::from_bytes(&ev.to_bytes()).unwrap(), ev);
    }
}
