use ark_bn254::G1Affine;
use chrono::NaiveDate;

use super::basename::validate_basename;
use super::comment::{verify_comment, GenesisWindow};
use super::genesis::GenesisTuple;
use super::ledger_enc::{decrypt_entry, CommentEntry, NymRegistry};
use super::params::{Mode, SchemeParams};
use crate::daa::IssuerPublicKey;
use crate::primitives::BoxSecretKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rejection {
    /// Basename is for another day or has `seq = 0`.
    Basename,
    /// `seq > tau`.
    OverThreshold,
    Moderation,
    Decrypt,
    MissingGenesis,
    Signature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Published(G1Affine),
    DuplicateNym(G1Affine),
    Rejected(Rejection),
}

/// Source of genesis pseudonyms for extended verification.
pub trait GenesisView {
    fn window(&self, w: &GenesisWindow) -> Option<Vec<G1Affine>>;
}

impl GenesisView for Vec<G1Affine> {
    fn window(&self, w: &GenesisWindow) -> Option<Vec<G1Affine>> {
        let start = usize::try_from(w.offset).ok()?;
        let end = start.checked_add(w.len as usize)?;
        self.get(start..end).map(<[_]>::to_vec)
    }
}

impl GenesisView for Vec<GenesisTuple> {
    fn window(&self, w: &GenesisWindow) -> Option<Vec<G1Affine>> {
        let start = usize::try_from(w.offset).ok()?;
        let end = start.checked_add(w.len as usize)?;
        self.get(start..end)
            .map(|gbs| gbs.iter().map(|gb| gb.nym1).collect())
    }
}

type Moderation = Box<dyn Fn(&[u8]) -> bool + Send + Sync>;

/// A website holding the current billing secret.
pub struct Website {
    pub id: String,
    params: SchemeParams,
    pk: IssuerPublicKey,
    billing_secret: BoxSecretKey,
    mode: Mode,
    moderation: Moderation,
}

impl Website {
    pub fn new(
        id: impl Into<String>,
        params: SchemeParams,
        pk: IssuerPublicKey,
        billing_secret: BoxSecretKey,
        mode: Mode,
    ) -> Self {
        Website {
            id: id.into(),
            params,
            pk,
            billing_secret,
            mode,
            moderation: Box::new(|_| true),
        }
    }

    /// Replaces the default accept-everything content policy.
    pub fn with_moderation(mut self, policy: impl Fn(&[u8]) -> bool + Send + Sync + 'static) -> Self {
        self.moderation = Box::new(policy);
        self
    }

    pub fn set_issuer_key(&mut self, pk: IssuerPublicKey) {
        self.pk = pk;
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Checks an entry and registers its pseudonym if everything verifies.
    pub fn process<R: NymRegistry>(
        &self,
        entry: &CommentEntry,
        m: &[u8],
        today: NaiveDate,
        genesis: Option<&dyn GenesisView>,
        registry: &R,
    ) -> Result<Verdict, R::Error> {
        let reject = |r| Ok(Verdict::Rejected(r));
        if !validate_basename(&entry.dom, today, self.params.tau) {
            if entry.dom.date == today && entry.dom.seq > self.params.tau {
                return reject(Rejection::OverThreshold);
            }
            return reject(Rejection::Basename);
        }
        if !(self.moderation)(m) {
            return reject(Rejection::Moderation);
        }
        let Ok(payload) = decrypt_entry(&self.billing_secret, &entry.ciphertext) else {
            return reject(Rejection::Decrypt);
        };
        let nym = payload.nym;
        let record = payload.into_record(entry.dom, entry.m_digest);
        let window = match self.mode {
            Mode::Base => None,
            Mode::Extended => {
                let found = record
                    .proof
                    .as_ref()
                    .zip(genesis)
                    .and_then(|(p, view)| view.window(&p.window));
                match found {
                    Some(w) => Some(w),
                    None => return reject(Rejection::MissingGenesis),
                }
            }
        };
        if !verify_comment(&self.params, &self.pk, &nym, &entry.dom, m, &record, window.as_deref()) {
            return reject(Rejection::Signature);
        }
        if registry.register_nym(&nym)? {
            Ok(Verdict::Published(nym))
        } else {
            Ok(Verdict::DuplicateNym(nym))
        }
    }
}
