//! Core protocol for throttled, accountable anonymous commenting.
//!
//! Users obtain an issuer credential once, after an identity verifier vouches
//! for them, and then sign each comment under a basename `(day, seq)` with
//! `seq` bounded by a per-day threshold. Signatures under the same basename by
//! the same key carry the same pseudonym, so a website can cap every verified
//! person at the threshold without learning who they are.
//!
//! - [`primitives`]: hashing, BN254 encodings, hash-to-curve, KDF, signatures, PKE.
//! - [`daa`]: linkable, updatable DAA credentials and signatures.
//! - [`zkp`]: join proofs, Pedersen commitments, one-of-many membership proofs.
//! - [`scheme`]: basenames, comments, claims, genesis tuples, ledger encryption.
//! - [`audit`]: identity verification sessions, pseudo-random audits, epoch rollover.

pub mod audit;
pub mod daa;
pub mod primitives;
pub mod scheme;
pub mod serde_b64;
pub mod wire;
pub mod zkp;
