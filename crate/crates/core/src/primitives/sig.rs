//! Ed25519 signatures for verifier attestations and issuer commitments.

use std::fmt;

use ed25519_dalek::Signer;
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

pub const VERIFY_KEY_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;

#[derive(Clone)]
pub struct SigningKey(ed25519_dalek::SigningKey);

/// Ed25519 public key bytes. Ordered and hashable so it can key registries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VerifyKey(#[serde(with = "crate::serde_b64::array")] pub [u8; VERIFY_KEY_LEN]);

#[derive(Clone)]
pub struct SigKeyPair {
    pub signing_key: SigningKey,
    pub verify_key: VerifyKey,
}

impl SigningKey {
    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        SigningKey(ed25519_dalek::SigningKey::from_bytes(bytes))
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_bytes()
    }

    pub fn verify_key(&self) -> VerifyKey {
        VerifyKey(self.0.verifying_key().to_bytes())
    }
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SigningKey(..)")
    }
}

impl VerifyKey {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        Some(VerifyKey(hex::decode(s).ok()?.try_into().ok()?))
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        Some(VerifyKey(bytes.try_into().ok()?))
    }
}

impl fmt::Debug for VerifyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VerifyKey({})", self.to_hex())
    }
}

impl SigKeyPair {
    pub fn from_signing_key(signing_key: SigningKey) -> Self {
        let verify_key = signing_key.verify_key();
        SigKeyPair {
            signing_key,
            verify_key,
        }
    }
}

impl fmt::Debug for SigKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigKeyPair")
            .field("verify_key", &self.verify_key)
            .finish_non_exhaustive()
    }
}

pub fn sig_keygen<R: RngCore + CryptoRng>(rng: &mut R) -> SigKeyPair {
    SigKeyPair::from_signing_key(SigningKey(ed25519_dalek::SigningKey::generate(rng)))
}

pub fn sig_sign(sk: &SigningKey, m: &[u8]) -> [u8; SIGNATURE_LEN] {
    sk.0.sign(m).to_bytes()
}

/// Returns false for malformed keys or signatures instead of failing.
pub fn sig_verify(pk: &VerifyKey, m: &[u8], sig: &[u8]) -> bool {
    let Ok(key) = ed25519_dalek::VerifyingKey::from_bytes(&pk.0) else {
        return false;
    };
    let Ok(sig) = ed25519_dalek::Signature::from_slice(sig) else {
        return false;
    };
    key.verify_strict(m, &sig).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{thread_rng, Rng};

    #[test]
    fn round_trip_and_rejections() {
        let mut rng = thread_rng();
        let kp = sig_keygen(&mut rng);
        let other = sig_keygen(&mut rng);
        let sig = sig_sign(&kp.signing_key, b"hello");
        assert!(sig_verify(&kp.verify_key, b"hello", &sig));
        assert!(!sig_verify(&other.verify_key, b"hello", &sig));
        assert!(!sig_verify(&kp.verify_key, b"hellp", &sig));
        let mut flipped = sig;
        flipped[10] ^= 1;
        assert!(!sig_verify(&kp.verify_key, b"hello", &flipped));
        assert!(!sig_verify(&kp.verify_key, b"hello", &sig[..63]));
        assert!(!sig_verify(&VerifyKey([0xff; 32]), b"hello", &sig));
    }

    #[test]
    fn random_messages_and_every_byte_mutation() {
        let mut rng = thread_rng();
        let kp = sig_keygen(&mut rng);
        for _ in 0..1000 {
            let len = rng.gen_range(0..64);
            let m: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let sig = sig_sign(&kp.signing_key, &m);
            assert!(sig_verify(&kp.verify_key, &m, &sig));
        }
        let sig = sig_sign(&kp.signing_key, b"m");
        for i in 0..SIGNATURE_LEN {
            for bit in 0..8 {
                let mut s = sig;
                s[i] ^= 1 << bit;
                assert!(!sig_verify(&kp.verify_key, b"m", &s), "byte {i} bit {bit}");
            }
        }
    }

    #[test]
    fn key_derivable_from_signing_key() {
        let kp = sig_keygen(&mut thread_rng());
        let restored = SigningKey::from_bytes(&kp.signing_key.to_bytes());
        assert_eq!(restored.verify_key(), kp.verify_key);
    }
}
