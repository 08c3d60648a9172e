//! Instantly-linkable, updatable DAA over BN254 (Brickell–Li construction).
//!
//! The issuer key is split in two. The persistent half (`gpk1`) is derived from
//! public coins only and contains the generators and `h1`. The ephemeral half
//! (`gpk2`) holds the per-epoch verification key `w = g2^gamma` and the blinding
//! base `h2`. A member's join commitment proves knowledge of `f` for
//! `F = h1^f` with a challenge that binds `gpk1` only, so the same message can
//! be replayed to the issuer in later epochs as an update message.
//!
//! A credential is `(A, x)` with `e(A, w * g2^x) = e(g1 * F, g2)`. Signatures
//! are `(B, K, T, c, nt, s_f, s_x, s_a, s_b)` where `B = h(dom)` is the base,
//! `K = B^f` is the pseudonym and `T = A * h2^a` blinds the credential.

use std::collections::BTreeSet;
use std::fmt;

use ark_bn254::{Bn254, G1Affine, G2Affine};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, VariableBaseMSM};
use ark_ff::{Field, Zero};
use ark_serialize::CanonicalSerialize;
use rand::{CryptoRng, Rng, RngCore};
use thiserror::Error;

use crate::primitives::curve::{encode_g1, encode_scalar, g1_generator, g2_generator};
use crate::primitives::{
    hash, hash_to_g1, hash_to_scalar, Digest, Scalar, SecretScalar, G1,
};
use crate::wire::{Reader, WireError, Writer};

pub const SECURITY_LEVEL: u32 = 128;
pub const SIGNATURE_COMPONENTS: u32 = 9;

const DAA_TAG: &[u8] = b"TT-DAA-v1";
const H1_LABEL: &[u8] = b"tt-h1";
const WIRE_VERSION: u8 = 1;

pub type MemberSecretKey = SecretScalar;
pub type Epoch = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DaaError {
    #[error("unsupported security level {0}")]
    UnsupportedSecurityLevel(u32),
    #[error("secret key must be nonzero")]
    ZeroSecretKey,
    #[error("join commitment failed verification")]
    InvalidCommitment,
    #[error("update message failed verification")]
    InvalidUpdateMessage,
    #[error("credential epoch {credential} does not match issuer key epoch {key}")]
    EpochMismatch { credential: Epoch, key: Epoch },
    #[error("credential does not verify for this key")]
    InvalidCredential,
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Persistent issuer parameters, reproducible by anyone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistentKey {
    pub g1: G1Affine,
    pub g2: G2Affine,
    pub h1: G1Affine,
}

/// Per-epoch issuer parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EphemeralKey {
    pub epoch: Epoch,
    pub h2: G1Affine,
    pub w: G2Affine,
}

/// `pk_I = (gpk1, gpk2)` with cached pairing preparation.
#[derive(Clone)]
pub struct IssuerPublicKey {
    pub gpk1: PersistentKey,
    pub gpk2: EphemeralKey,
    digest: Digest,
    g2_prepared: <Bn254 as Pairing>::G2Prepared,
    w_prepared: <Bn254 as Pairing>::G2Prepared,
}

#[derive(Clone)]
pub struct IssuerSecretKey {
    pub epoch: Epoch,
    gamma: Scalar,
}

/// Join commitment `com = (F, c, s_f, nonce)`; doubles as the update message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinCommitment {
    pub f_point: G1Affine,
    pub c: Digest,
    pub s_f: Scalar,
    pub nonce: Vec<u8>,
}

pub type UpdateMessage = JoinCommitment;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Credential {
    pub a: G1Affine,
    pub x: Scalar,
    pub epoch: Epoch,
}

/// Nine-component signature; `base` and `nym` are the first two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaaSignature {
    pub base: G1Affine,
    pub nym: G1Affine,
    pub t: G1Affine,
    pub c: Scalar,
    pub nonce: [u8; 32],
    pub s_f: Scalar,
    pub s_x: Scalar,
    pub s_a: Scalar,
    pub s_b: Scalar,
}

#[derive(Clone, Debug, Default)]
pub struct RevocationList {
    keys: BTreeSet<[u8; 32]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Linked,
    Unlinked,
    /// One of the signatures is malformed.
    Invalid,
}

impl PersistentKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(WIRE_VERSION)
            .u32(SECURITY_LEVEL)
            .g1(&self.g1)
            .g2(&self.g2)
            .g1(&self.h1)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DaaError> {
        let mut r = Reader::versioned(bytes, WIRE_VERSION)?;
        let level = r.u32()?;
        if level != SECURITY_LEVEL {
            return Err(DaaError::UnsupportedSecurityLevel(level));
        }
        let key = PersistentKey {
            g1: r.g1_nonzero()?,
            g2: r.g2()?,
            h1: r.g1_nonzero()?,
        };
        r.finish()?;
        if key.g2.is_zero() {
            return Err(WireError::Invalid("identity g2").into());
        }
        Ok(key)
    }
}

impl IssuerPublicKey {
    pub fn new(gpk1: PersistentKey, gpk2: EphemeralKey) -> Self {
        let mut pk = IssuerPublicKey {
            g2_prepared: gpk1.g2.into(),
            w_prepared: gpk2.w.into(),
            gpk1,
            gpk2,
            digest: Digest::default(),
        };
        pk.digest = hash([pk.to_bytes()]);
        pk
    }

    pub fn epoch(&self) -> Epoch {
        self.gpk2.epoch
    }

    /// Digest of the canonical encoding, used in transcripts.
    pub fn digest(&self) -> Digest {
        self.digest
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(WIRE_VERSION)
            .bytes(&self.gpk1.to_bytes())
            .u64(self.gpk2.epoch)
            .g1(&self.gpk2.h2)
            .g2(&self.gpk2.w)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DaaError> {
        let mut r = Reader::versioned(bytes, WIRE_VERSION)?;
        let gpk1 = PersistentKey::from_bytes(r.bytes()?)?;
        let epoch = r.u64()?;
        let h2 = r.g1_nonzero()?;
        let w = r.g2()?;
        r.finish()?;
        if w.is_zero() {
            return Err(WireError::Invalid("identity w").into());
        }
        Ok(IssuerPublicKey::new(gpk1, EphemeralKey { epoch, h2, w }))
    }
}

impl PartialEq for IssuerPublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.gpk1 == other.gpk1 && self.gpk2 == other.gpk2
    }
}

impl Eq for IssuerPublicKey {}

impl fmt::Debug for IssuerPublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IssuerPublicKey")
            .field("epoch", &self.gpk2.epoch)
            .field("digest", &self.digest)
            .finish()
    }
}

impl IssuerSecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(WIRE_VERSION)
            .u64(self.epoch)
            .scalar(&self.gamma)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DaaError> {
        let mut r = Reader::versioned(bytes, WIRE_VERSION)?;
        let epoch = r.u64()?;
        let gamma = r.scalar()?;
        r.finish()?;
        if gamma.is_zero() {
            return Err(DaaError::ZeroSecretKey);
        }
        Ok(IssuerSecretKey { epoch, gamma })
    }
}

impl fmt::Debug for IssuerSecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IssuerSecretKey")
            .field("epoch", &self.epoch)
            .finish_non_exhaustive()
    }
}

impl JoinCommitment {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(WIRE_VERSION)
            .g1(&self.f_point)
            .bytes(&self.c.0)
            .scalar(&self.s_f)
            .bytes(&self.nonce)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DaaError> {
        let mut r = Reader::versioned(bytes, WIRE_VERSION)?;
        let com = JoinCommitment {
            f_point: r.g1_nonzero()?,
            c: Digest(r.array()?),
            s_f: r.scalar()?,
            nonce: r.bytes()?.to_vec(),
        };
        r.finish()?;
        Ok(com)
    }
}

impl Credential {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(WIRE_VERSION)
            .u64(self.epoch)
            .g1(&self.a)
            .scalar(&self.x)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DaaError> {
        let mut r = Reader::versioned(bytes, WIRE_VERSION)?;
        let cred = Credential {
            epoch: r.u64()?,
            a: r.g1_nonzero()?,
            x: r.scalar()?,
        };
        r.finish()?;
        Ok(cred)
    }

    /// Pairing check `e(A, w * g2^x) = e(g1 * F, g2)` for the member key `f`.
    pub fn verify(&self, pk: &IssuerPublicKey, sk: &MemberSecretKey) -> bool {
        let f_point = (pk.gpk1.h1 * sk.expose()).into_affine();
        self.verify_for_point(pk, &f_point)
    }

    pub fn verify_for_point(&self, pk: &IssuerPublicKey, f_point: &G1Affine) -> bool {
        if self.epoch != pk.epoch() || self.a.is_zero() {
            return false;
        }
        let lhs_g2 = (pk.gpk2.w + pk.gpk1.g2 * self.x).into_affine();
        let rhs_g1 = (pk.gpk1.g1 + *f_point).into_affine();
        let out = Bn254::multi_pairing([self.a, -rhs_g1], [lhs_g2, pk.gpk1.g2]);
        out.is_zero()
    }
}

impl DaaSignature {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(WIRE_VERSION)
            .u32(SIGNATURE_COMPONENTS)
            .g1(&self.base)
            .g1(&self.nym)
            .g1(&self.t)
            .scalar(&self.c)
            .bytes(&self.nonce)
            .scalar(&self.s_f)
            .scalar(&self.s_x)
            .scalar(&self.s_a)
            .scalar(&self.s_b)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DaaError> {
        let mut r = Reader::versioned(bytes, WIRE_VERSION)?;
        let count = r.u32()?;
        if count != SIGNATURE_COMPONENTS {
            return Err(WireError::Count {
                expected: SIGNATURE_COMPONENTS as usize,
                actual: count as usize,
            }
            .into());
        }
        let sig = DaaSignature {
            base: r.g1_nonzero()?,
            nym: r.g1_nonzero()?,
            t: r.g1_nonzero()?,
            c: r.scalar()?,
            nonce: r.array()?,
            s_f: r.scalar()?,
            s_x: r.scalar()?,
            s_a: r.scalar()?,
            s_b: r.scalar()?,
        };
        r.finish()?;
        Ok(sig)
    }

    fn well_formed(&self) -> bool {
        !self.base.is_zero() && !self.nym.is_zero() && !self.t.is_zero()
    }
}

impl RevocationList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the key was already present.
    pub fn insert(&mut self, sk: &MemberSecretKey) -> bool {
        self.keys.insert(sk.to_bytes())
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    fn iter(&self) -> impl Iterator<Item = MemberSecretKey> + '_ {
        self.keys
            .iter()
            .map(|b| MemberSecretKey::from_bytes(b).expect("stored keys are valid"))
    }
}

impl FromIterator<MemberSecretKey> for RevocationList {
    fn from_iter<I: IntoIterator<Item = MemberSecretKey>>(iter: I) -> Self {
        let mut rl = RevocationList::new();
        for sk in iter {
            rl.insert(&sk);
        }
        rl
    }
}

pub fn setup1(security_level: u32) -> Result<PersistentKey, DaaError> {
    if security_level != SECURITY_LEVEL {
        return Err(DaaError::UnsupportedSecurityLevel(security_level));
    }
    Ok(PersistentKey {
        g1: g1_generator(),
        g2: g2_generator(),
        h1: hash_to_g1(H1_LABEL),
    })
}

/// Fresh epoch key material for `gpk1`.
pub fn setup2<R: RngCore + CryptoRng>(
    gpk1: &PersistentKey,
    epoch: Epoch,
    rng: &mut R,
) -> (IssuerPublicKey, IssuerSecretKey) {
    let gamma = *SecretScalar::random(rng).expose();
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let h2 = hash_to_g1(&[b"tt-h2:".as_slice(), &epoch.to_be_bytes(), &seed].concat());
    let w = (gpk1.g2 * gamma).into_affine();
    let pk = IssuerPublicKey::new(gpk1.clone(), EphemeralKey { epoch, h2, w });
    (pk, IssuerSecretKey { epoch, gamma })
}

/// Public consistency check between the two key halves and the secret.
pub fn check_key_pair(pk: &IssuerPublicKey, isk: &IssuerSecretKey) -> bool {
    let Ok(expected_gpk1) = setup1(SECURITY_LEVEL) else {
        return false;
    };
    pk.gpk1 == expected_gpk1
        && pk.gpk2.epoch == isk.epoch
        && (pk.gpk1.g2 * isk.gamma).into_affine() == pk.gpk2.w
}

fn join_challenge(gpk1: &PersistentKey, nonce: &[u8], f_point: &G1Affine, r: &G1Affine) -> Digest {
    hash([
        gpk1.to_bytes().as_slice(),
        nonce,
        &encode_g1(f_point),
        &encode_g1(r),
    ])
}

fn digest_scalar(d: &Digest) -> Scalar {
    use ark_ff::PrimeField;
    Scalar::from_be_bytes_mod_order(&d.0)
}

/// Member side of join: `F = h1^f` with a Schnorr proof bound to `gpk1` and `nonce`.
pub fn join<R: RngCore + CryptoRng>(
    gpk1: &PersistentKey,
    sk: &MemberSecretKey,
    nonce: &[u8],
    rng: &mut R,
) -> Result<JoinCommitment, DaaError> {
    let f = *sk.expose();
    if f.is_zero() {
        return Err(DaaError::ZeroSecretKey);
    }
    let f_point = (gpk1.h1 * f).into_affine();
    let r_f = *SecretScalar::random(rng).expose();
    let r = (gpk1.h1 * r_f).into_affine();
    let c = join_challenge(gpk1, nonce, &f_point, &r);
    let s_f = r_f + digest_scalar(&c) * f;
    Ok(JoinCommitment {
        f_point,
        c,
        s_f,
        nonce: nonce.to_vec(),
    })
}

pub fn verify_join_commitment(gpk1: &PersistentKey, com: &JoinCommitment) -> bool {
    if com.f_point.is_zero() {
        return false;
    }
    let r = (gpk1.h1 * com.s_f - com.f_point * digest_scalar(&com.c)).into_affine();
    join_challenge(gpk1, &com.nonce, &com.f_point, &r) == com.c
}

fn issue_for_point<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    isk: &IssuerSecretKey,
    f_point: &G1Affine,
    rng: &mut R,
) -> Credential {
    loop {
        let x = *SecretScalar::random(rng).expose();
        let Some(inv) = (isk.gamma + x).inverse() else {
            continue;
        };
        let a = ((pk.gpk1.g1 + *f_point) * inv).into_affine();
        return Credential {
            a,
            x,
            epoch: isk.epoch,
        };
    }
}

/// Issues a credential over `F`; the member secret is never seen.
pub fn issue<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    isk: &IssuerSecretKey,
    com: &JoinCommitment,
    rng: &mut R,
) -> Result<Credential, DaaError> {
    if !verify_join_commitment(&pk.gpk1, com) {
        return Err(DaaError::InvalidCommitment);
    }
    Ok(issue_for_point(pk, isk, &com.f_point, rng))
}

pub fn nym_gen(sk: &MemberSecretKey, dom: &[u8]) -> G1Affine {
    (hash_to_g1(dom) * sk.expose()).into_affine()
}

pub fn nym_extract(sig: &DaaSignature) -> G1Affine {
    sig.nym
}

pub fn verify_bsn(sig: &DaaSignature, dom: &[u8]) -> bool {
    sig.base == hash_to_g1(dom)
}

fn gt_bytes(v: &PairingOutput<Bn254>) -> Vec<u8> {
    let mut out = Vec::with_capacity(384);
    v.0.serialize_compressed(&mut out)
        .expect("serializing into a Vec cannot fail");
    out
}

#[allow(clippy::too_many_arguments)]
fn sign_challenge(
    pk: &IssuerPublicKey,
    base: &G1Affine,
    nym: &G1Affine,
    t: &G1Affine,
    r1: &G1Affine,
    r2: &PairingOutput<Bn254>,
    nonce: &[u8; 32],
    msg: &[u8],
) -> Scalar {
    hash_to_scalar([
        DAA_TAG,
        pk.digest().as_bytes(),
        &encode_g1(base),
        &encode_g1(nym),
        &encode_g1(t),
        &encode_g1(r1),
        &gt_bytes(r2),
        nonce,
        msg,
    ])
}

fn msm(bases: &[G1Affine], scalars: &[Scalar]) -> G1 {
    G1::msm(bases, scalars).expect("equal lengths")
}

/// Signs `msg` under basename `dom`.
pub fn sign<R: RngCore + CryptoRng>(
    pk: &IssuerPublicKey,
    sk: &MemberSecretKey,
    cred: &Credential,
    dom: &[u8],
    msg: &[u8],
    rng: &mut R,
) -> Result<DaaSignature, DaaError> {
    if cred.epoch != pk.epoch() {
        return Err(DaaError::EpochMismatch {
            credential: cred.epoch,
            key: pk.epoch(),
        });
    }
    let f = *sk.expose();
    let base = hash_to_g1(dom);
    let nym = (base * f).into_affine();

    let a = *SecretScalar::random(rng).expose();
    let b = a * cred.x;
    let t = (cred.a + pk.gpk2.h2 * a).into_affine();

    let [r_f, r_x, r_a, r_b] = [(); 4].map(|_| *SecretScalar::random(rng).expose());
    let r1 = (base * r_f).into_affine();
    let p1 = msm(&[t, pk.gpk1.h1, pk.gpk2.h2], &[-r_x, r_f, r_b]).into_affine();
    let p2 = (pk.gpk2.h2 * r_a).into_affine();
    let r2 = Bn254::multi_pairing(
        [p1, p2],
        [pk.g2_prepared.clone(), pk.w_prepared.clone()],
    );
    let nonce: [u8; 32] = rng.gen();
    let c = sign_challenge(pk, &base, &nym, &t, &r1, &r2, &nonce, msg);
    Ok(DaaSignature {
        base,
        nym,
        t,
        c,
        nonce,
        s_f: r_f + c * f,
        s_x: r_x + c * cred.x,
        s_a: r_a + c * a,
        s_b: r_b + c * b,
    })
}

/// Verifies a signature; never panics on adversarial input.
pub fn verify(
    pk: &IssuerPublicKey,
    msg: &[u8],
    dom: &[u8],
    sig: &DaaSignature,
    rl: &RevocationList,
) -> bool {
    if !sig.well_formed() || !verify_bsn(sig, dom) {
        return false;
    }
    let r1 = (sig.base * sig.s_f - sig.nym * sig.c).into_affine();
    let p1 = msm(
        &[sig.t, pk.gpk1.h1, pk.gpk2.h2, pk.gpk1.g1],
        &[-sig.s_x, sig.s_f, sig.s_b, sig.c],
    )
    .into_affine();
    let p2 = msm(&[pk.gpk2.h2, sig.t], &[sig.s_a, -sig.c]).into_affine();
    let r2 = Bn254::multi_pairing(
        [p1, p2],
        [pk.g2_prepared.clone(), pk.w_prepared.clone()],
    );
    if sign_challenge(pk, &sig.base, &sig.nym, &sig.t, &r1, &r2, &sig.nonce, msg) != sig.c {
        return false;
    }
    !rl
        .iter()
        .any(|revoked| (sig.base * revoked.expose()).into_affine() == sig.nym)
}

pub fn link(s0: &DaaSignature, s1: &DaaSignature) -> Link {
    if !s0.well_formed() || !s1.well_formed() {
        return Link::Invalid;
    }
    if nym_extract(s0) == nym_extract(s1) {
        Link::Linked
    } else {
        Link::Unlinked
    }
}

/// [`link`] over serialized signatures; malformed input yields [`Link::Invalid`].
pub fn link_encoded(s0: &[u8], s1: &[u8]) -> Link {
    match (DaaSignature::from_bytes(s0), DaaSignature::from_bytes(s1)) {
        (Ok(a), Ok(b)) => link(&a, &b),
        _ => Link::Invalid,
    }
}

/// Update message for later epochs: a join commitment with a fresh nonce.
pub fn user_update_msg<R: RngCore + CryptoRng>(
    gpk1: &PersistentKey,
    sk: &MemberSecretKey,
    rng: &mut R,
) -> Result<UpdateMessage, DaaError> {
    let nonce: [u8; 32] = rng.gen();
    join(gpk1, sk, &nonce, rng)
}

/// Re-issues a credential for a new epoch without member interaction.
pub fn issuer_update<R: RngCore + CryptoRng>(
    pk_new: &IssuerPublicKey,
    u: &UpdateMessage,
    isk_new: &IssuerSecretKey,
    rng: &mut R,
) -> Result<Credential, DaaError> {
    if !verify_join_commitment(&pk_new.gpk1, u) {
        return Err(DaaError::InvalidUpdateMessage);
    }
    Ok(issue_for_point(pk_new, isk_new, &u.f_point, rng))
}

/// Scalar encoding helper shared with callers that persist member keys.
pub fn encode_member_key(sk: &MemberSecretKey) -> [u8; 32] {
    encode_scalar(sk.expose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::thread_rng;
    use std::collections::HashSet;

    struct Fixture {
        pk: IssuerPublicKey,
        isk: IssuerSecretKey,
    }

    fn fixture() -> Fixture {
        let gpk1 = setup1(SECURITY_LEVEL).unwrap();
        let (pk, isk) = setup2(&gpk1, 1, &mut thread_rng());
        Fixture { pk, isk }
    }

    fn member(fx: &Fixture) -> (MemberSecretKey, Credential) {
        let mut rng = thread_rng();
        let sk = MemberSecretKey::random(&mut rng);
        let com = join(&fx.pk.gpk1, &sk, b"nonce", &mut rng).unwrap();
        let cred = issue(&fx.pk, &fx.isk, &com, &mut rng).unwrap();
        (sk, cred)
    }

    #[test]
    fn setup1_is_public_coin() {
        let a = setup1(128).unwrap();
        let b = setup1(128).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        assert!(!a.h1.is_zero());
        assert!(a.h1.is_in_correct_subgroup_assuming_on_curve());
        assert_eq!(PersistentKey::from_bytes(&a.to_bytes()).unwrap(), a);
        assert_eq!(setup1(80), Err(DaaError::UnsupportedSecurityLevel(80)));
    }

    #[test]
    fn setup2_fresh_and_consistent() {
        let gpk1 = setup1(128).unwrap();
        let mut rng = thread_rng();
        let (pk_a, isk_a) = setup2(&gpk1, 1, &mut rng);
        let (pk_b, isk_b) = setup2(&gpk1, 1, &mut rng);
        assert_ne!(pk_a.gpk2, pk_b.gpk2);
        assert!(check_key_pair(&pk_a, &isk_a));
        assert!(check_key_pair(&pk_b, &isk_b));
        assert!(!check_key_pair(&pk_a, &isk_b));
        let restored = IssuerPublicKey::from_bytes(&pk_a.to_bytes()).unwrap();
        assert_eq!(restored, pk_a);
        assert_eq!(restored.digest(), pk_a.digest());
        let isk_restored = IssuerSecretKey::from_bytes(&isk_a.to_bytes()).unwrap();
        assert!(check_key_pair(&pk_a, &isk_restored));
    }

    #[test]
    fn join_commitment_completeness_and_binding() {
        let fx = fixture();
        let mut rng = thread_rng();
        let sk = MemberSecretKey::random(&mut rng);
        let com = join(&fx.pk.gpk1, &sk, b"n1", &mut rng).unwrap();
        assert!(verify_join_commitment(&fx.pk.gpk1, &com));
        let mut bad = com.clone();
        bad.s_f += Scalar::from(1u64);
        assert!(!verify_join_commitment(&fx.pk.gpk1, &bad));
        let mut bad_nonce = com.clone();
        bad_nonce.nonce = b"n2".to_vec();
        assert!(!verify_join_commitment(&fx.pk.gpk1, &bad_nonce));
        let other = join(&fx.pk.gpk1, &sk, b"n2", &mut rng).unwrap();
        assert_ne!(other.c, com.c);
        assert_eq!(JoinCommitment::from_bytes(&com.to_bytes()).unwrap(), com);
    }

    #[test]
    fn issue_rejects_invalid_commitment_and_randomizes() {
        let fx = fixture();
        let mut rng = thread_rng();
        let sk = MemberSecretKey::random(&mut rng);
        let com = join(&fx.pk.gpk1, &sk, b"n", &mut rng).unwrap();
        let c1 = issue(&fx.pk, &fx.isk, &com, &mut rng).unwrap();
        let c2 = issue(&fx.pk, &fx.isk, &com, &mut rng).unwrap();
        assert_ne!(c1, c2);
        assert!(c1.verify(&fx.pk, &sk));
        assert!(c2.verify(&fx.pk, &sk));
        assert!(!c1.verify(&fx.pk, &MemberSecretKey::random(&mut rng)));
        let mut bad = com.clone();
        bad.f_point = (bad.f_point + fx.pk.gpk1.g1).into_affine();
        assert_eq!(
            issue(&fx.pk, &fx.isk, &bad, &mut rng),
            Err(DaaError::InvalidCommitment)
        );
        assert_eq!(Credential::from_bytes(&c1.to_bytes()).unwrap(), c1);
    }

    #[test]
    fn sign_verify_link() {
        let fx = fixture();
        let mut rng = thread_rng();
        let (sk, cred) = member(&fx);
        let rl = RevocationList::new();
        let s0 = sign(&fx.pk, &sk, &cred, b"dom1", b"m0", &mut rng).unwrap();
        let s1 = sign(&fx.pk, &sk, &cred, b"dom1", b"m1", &mut rng).unwrap();
        let s2 = sign(&fx.pk, &sk, &cred, b"dom2", b"m0", &mut rng).unwrap();
        assert!(verify(&fx.pk, b"m0", b"dom1", &s0, &rl));
        assert!(verify(&fx.pk, b"m1", b"dom1", &s1, &rl));
        assert!(!verify(&fx.pk, b"m1", b"dom1", &s0, &rl));
        assert!(!verify(&fx.pk, b"m0", b"dom2", &s0, &rl));
        assert_eq!(s0.nym, s1.nym);
        assert_ne!(s0.c, s1.c);
        assert_ne!(s0.nym, s2.nym);
        assert_eq!(link(&s0, &s1), Link::Linked);
        assert_eq!(link(&s0, &s2), Link::Unlinked);
        assert_eq!(link_encoded(&s0.to_bytes(), &s1.to_bytes()), Link::Linked);
        assert_eq!(link_encoded(&s0.to_bytes()[..40], &s1.to_bytes()), Link::Invalid);
        assert_eq!(nym_extract(&s0), nym_gen(&sk, b"dom1"));
        assert!(verify_bsn(&s0, b"dom1"));
        assert!(!verify_bsn(&s0, b"dom2"));
        assert_eq!(DaaSignature::from_bytes(&s0.to_bytes()).unwrap(), s0);
    }

    #[test]
    fn nym_differs_across_bases_by_exponentiation_oracle() {
        let mut rng = thread_rng();
        let sk = MemberSecretKey::random(&mut rng);
        let b1 = hash_to_g1(b"dom1");
        let b2 = hash_to_g1(b"dom2");
        // Double-and-add reference exponentiation, independent of the MSM path.
        let pow = |base: G1Affine| -> G1Affine {
            use ark_ff::{BigInteger, PrimeField};
            let bits = sk.expose().into_bigint().to_bits_be();
            let mut acc = G1::zero();
            for bit in bits {
                acc = acc + acc;
                if bit {
                    acc += base;
                }
            }
            acc.into_affine()
        };
        assert_eq!(nym_gen(&sk, b"dom1"), pow(b1));
        assert_eq!(nym_gen(&sk, b"dom2"), pow(b2));
        assert_ne!(pow(b1), pow(b2));
    }

    #[test]
    fn nym_gen_injective_over_keys() {
        let mut rng = thread_rng();
        let mut seen = HashSet::new();
        for _ in 0..100 {
            let sk = MemberSecretKey::random(&mut rng);
            assert!(seen.insert(encode_g1(&nym_gen(&sk, b"fixed"))));
        }
    }

    #[test]
    fn revocation_over_all_subsets() {
        let fx = fixture();
        let mut rng = thread_rng();
        let members: Vec<_> = (0..4).map(|_| member(&fx)).collect();
        let sigs: Vec<_> = members
            .iter()
            .map(|(sk, cred)| sign(&fx.pk, sk, cred, b"d", b"m", &mut rng).unwrap())
            .collect();
        for mask in 0u32..16 {
            let rl: RevocationList = members
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (sk, _))| *sk)
                .collect();
            for (i, sig) in sigs.iter().enumerate() {
                let revoked = mask & (1 << i) != 0;
                assert_eq!(verify(&fx.pk, b"m", b"d", sig, &rl), !revoked);
            }
        }
        let mut rl = RevocationList::new();
        assert!(rl.insert(&members[0].0));
        assert!(!rl.insert(&members[0].0));
        assert_eq!(rl.len(), 1);
    }

    #[test]
    fn epoch_mismatch_and_update() {
        let fx = fixture();
        let mut rng = thread_rng();
        let (sk, cred) = member(&fx);
        let (pk2, isk2) = setup2(&fx.pk.gpk1, 2, &mut rng);
        assert!(matches!(
            sign(&pk2, &sk, &cred, b"d", b"m", &mut rng),
            Err(DaaError::EpochMismatch { credential: 1, key: 2 })
        ));
        // Old-epoch credential, forced through with the new key's epoch label.
        let mut stale = cred.clone();
        stale.epoch = 2;
        let forged = sign(&pk2, &sk, &stale, b"d", b"m", &mut rng).unwrap();
        assert!(!verify(&pk2, b"m", b"d", &forged, &RevocationList::new()));

        let u = user_update_msg(&fx.pk.gpk1, &sk, &mut rng).unwrap();
        assert!(verify_join_commitment(&pk2.gpk1, &u));
        let cred2 = issuer_update(&pk2, &u, &isk2, &mut rng).unwrap();
        let sig = sign(&pk2, &sk, &cred2, b"d", b"m", &mut rng).unwrap();
        assert!(verify(&pk2, b"m", b"d", &sig, &RevocationList::new()));
        assert_eq!(sig.nym, nym_gen(&sk, b"d"));

        let mut bad = u.clone();
        bad.f_point = fx.pk.gpk1.h1;
        assert_eq!(
            issuer_update(&pk2, &bad, &isk2, &mut rng),
            Err(DaaError::InvalidUpdateMessage)
        );
    }

    #[test]
    fn signature_decoding_rejects_wrong_component_count() {
        let fx = fixture();
        let (sk, cred) = member(&fx);
        let sig = sign(&fx.pk, &sk, &cred, b"d", b"m", &mut thread_rng()).unwrap();
        let mut bytes = sig.to_bytes();
        bytes[4] = 8;
        assert!(matches!(
            DaaSignature::from_bytes(&bytes),
            Err(DaaError::Wire(WireError::Count { expected: 9, actual: 8 }))
        ));
    }
}
