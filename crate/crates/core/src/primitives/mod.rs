//! Hashing, BN254 groups, key derivation, signatures and public-key encryption.

pub mod curve;
pub mod h2c;
pub mod hash;
pub mod kdf;
pub mod pke;
pub mod sig;

pub use curve::{
    decode_g1, decode_g1_nonzero, decode_g2, decode_scalar, encode_g1, encode_g2, encode_scalar,
    random_scalar, EncodingError, Scalar, SecretScalar, G1, G2,
};
pub use h2c::hash_to_g1;
pub use hash::{hash, hash_to_scalar, Digest};
pub use kdf::{kdf, KDF_ITERATIONS};
pub use pke::{pke_decrypt, pke_encrypt, pke_keygen, BoxKeyPair, BoxPublicKey, BoxSecretKey, Ciphertext, PkeError};
pub use sig::{sig_keygen, sig_sign, sig_verify, SigKeyPair, SigningKey, VerifyKey};
