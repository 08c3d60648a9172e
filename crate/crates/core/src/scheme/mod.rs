//! The commenting scheme built on the DAA and proof layers.
//!
//! A user signs each comment under a basename `d:<date>:<seq>` with
//! `1 <= seq <= tau`, so one credential yields at most `tau` distinct
//! pseudonyms per day. Comments go to the ledger encrypted under the current
//! billing key; the author keeps the encryption randomness and can later
//! prove that a suppressed comment was valid.

mod basename;
mod comment;
mod genesis;
mod join;
mod ledger_enc;
mod params;
mod website;

pub use basename::{make_basename, validate_basename, Basename, BasenameError};
pub use comment::{
    claim, comment, comment_extended, verify_claim, verify_comment, verify_comment_with_rl,
    CommentRecord, Evidence, ExtendedProof, GenesisSubset, GenesisWindow,
};
pub use genesis::{attest_genesis, attribute, genesis_nym, GenesisError, GenesisTuple};
pub use join::{
    issue_user, join_request, join_user, JoinError, JoinRequest, Member, VerificationDb,
};
pub use ledger_enc::{
    decrypt_entry, encrypt_for_ledger, next_basename, recover_last_seq, BillingKey,
    CommentEntry, LedgerPayload, NymLookup, NymRegistry,
};
pub use params::{keygen, setup, Mode, SchemeError, SchemeParams, DEFAULT_TAU};
pub use website::{GenesisView, Rejection, Verdict, Website};
