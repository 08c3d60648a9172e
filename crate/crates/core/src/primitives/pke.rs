//! Randomness-recoverable sealed boxes (X25519 + XSalsa20-Poly1305).
//!
//! The ephemeral key is derived from caller-held randomness `r`, so the same
//! `(pk, m, r)` always yields the same ciphertext. A user who later reveals `r`
//! lets anyone re-encrypt and compare byte-for-byte. The layout is that of a
//! libsodium sealed box: `ephemeral_pk || box(m)` with nonce
//! `BLAKE2b-192(ephemeral_pk || pk)`.

use std::fmt;

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::hash::hash;

pub const BOX_KEY_LEN: usize = 32;
/// Ephemeral public key plus Poly1305 tag.
pub const SEAL_OVERHEAD: usize = 32 + 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PkeError {
    #[error("ciphertext failed authentication")]
    Tampered,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxPublicKey(#[serde(with = "crate::serde_b64::array")] pub [u8; BOX_KEY_LEN]);

#[derive(Clone)]
pub struct BoxSecretKey(crypto_box::SecretKey);

#[derive(Clone)]
pub struct BoxKeyPair {
    pub public: BoxPublicKey,
    pub secret: BoxSecretKey,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ciphertext(#[serde(with = "crate::serde_b64::bytes")] pub Vec<u8>);

impl fmt::Debug for BoxPublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoxPublicKey({})", hex::encode(self.0))
    }
}

impl fmt::Debug for BoxSecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoxSecretKey(..)")
    }
}

impl fmt::Debug for Ciphertext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ciphertext({} bytes)", self.0.len())
    }
}

impl BoxSecretKey {
    pub fn from_bytes(bytes: [u8; BOX_KEY_LEN]) -> Self {
        BoxSecretKey(crypto_box::SecretKey::from_bytes(bytes))
    }

    pub fn to_bytes(&self) -> [u8; BOX_KEY_LEN] {
        self.0.to_bytes()
    }

    pub fn public_key(&self) -> BoxPublicKey {
        BoxPublicKey(*self.0.public_key().as_bytes())
    }
}

impl BoxKeyPair {
    pub fn from_secret(secret: BoxSecretKey) -> Self {
        BoxKeyPair {
            public: secret.public_key(),
            secret,
        }
    }
}

pub fn pke_keygen<R: RngCore + CryptoRng>(rng: &mut R) -> BoxKeyPair {
    BoxKeyPair::from_secret(BoxSecretKey(crypto_box::SecretKey::generate(rng)))
}

/// Encrypts `m` to `pk`; deterministic in `(pk, m, r)`.
pub fn pke_encrypt(pk: &BoxPublicKey, m: &[u8], r: &[u8; 32]) -> Ciphertext {
    let seed = hash(["tt-pke-ephemeral".as_bytes(), r.as_slice()]);
    let mut coins = ChaCha20Rng::from_seed(seed.0);
    let recipient = crypto_box::PublicKey::from_bytes(pk.0);
    let sealed = recipient
        .seal(&mut coins, m)
        .expect("sealing into a Vec cannot fail");
    Ciphertext(sealed)
}

pub fn pke_decrypt(sk: &BoxSecretKey, c: &Ciphertext) -> Result<Vec<u8>, PkeError> {
    sk.0.unseal(&c.0).map_err(|_| PkeError::Tampered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{thread_rng, Rng};

    #[test]
    fn round_trip_deterministic_and_tamper_evident() {
        let mut rng = thread_rng();
        let kp = pke_keygen(&mut rng);
        let r: [u8; 32] = rng.gen();
        let c = pke_encrypt(&kp.public, b"sigma||nym", &r);
        assert_eq!(c.0.len(), 10 + SEAL_OVERHEAD);
        assert_eq!(pke_decrypt(&kp.secret, &c).unwrap(), b"sigma||nym");
        assert_eq!(pke_encrypt(&kp.public, b"sigma||nym", &r), c);
        let r2: [u8; 32] = rng.gen();
        assert_ne!(pke_encrypt(&kp.public, b"sigma||nym", &r2), c);
        let mut bad = c.clone();
        bad.0[40] ^= 0x01;
        assert_eq!(pke_decrypt(&kp.secret, &bad), Err(PkeError::Tampered));
    }

    #[test]
    fn random_messages_and_every_byte_mutation() {
        let mut rng = thread_rng();
        let kp = pke_keygen(&mut rng);
        let other = pke_keygen(&mut rng);
        for _ in 0..1000 {
            let len = rng.gen_range(0..128);
            let m: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let r: [u8; 32] = rng.gen();
            let c = pke_encrypt(&kp.public, &m, &r);
            assert_eq!(pke_decrypt(&kp.secret, &c).unwrap(), m);
        }
        let c = pke_encrypt(&kp.public, b"payload", &[7u8; 32]);
        assert!(pke_decrypt(&other.secret, &c).is_err());
        for i in 0..c.0.len() {
            let mut bad = c.clone();
            bad.0[i] ^= 0x80;
            assert!(pke_decrypt(&kp.secret, &bad).is_err(), "byte {i}");
        }
        assert!(pke_decrypt(&kp.secret, &Ciphertext(c.0[..20].to_vec())).is_err());
    }
}
