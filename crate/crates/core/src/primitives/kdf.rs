//! Password-based derivation of member secret keys.

use ark_ff::{PrimeField, Zero};
use pbkdf2::pbkdf2_hmac;
use sha2::Sha256;

use super::curve::{Scalar, SecretScalar};
use super::hash::hash;

pub const KDF_ITERATIONS: u32 = 100_100;

/// Derives the member secret from login and password with PBKDF2-HMAC-SHA256.
///
/// The salt is `hash(["tt-kdf", login])`, so the key is recomputable on any
/// device from the two strings alone.
pub fn kdf(login: &str, pw: &str) -> SecretScalar {
    kdf_with_iterations(login, pw, KDF_ITERATIONS)
}

pub fn kdf_with_iterations(login: &str, pw: &str, iterations: u32) -> SecretScalar {
    let salt = hash(["tt-kdf".as_bytes(), login.as_bytes()]);
    let mut counter: u32 = 0;
    loop {
        let mut salted = salt.0.to_vec();
        if counter > 0 {
            salted.extend_from_slice(&counter.to_be_bytes());
        }
        let mut out = [0u8; 64];
        pbkdf2_hmac::<Sha256>(pw.as_bytes(), &salted, iterations, &mut out);
        let s = Scalar::from_be_bytes_mod_order(&out);
        if !s.is_zero() {
            return SecretScalar::new(s).expect("nonzero");
        }
        counter += 1;
    }
}
