use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::daa::{self, DaaError, Epoch, IssuerPublicKey, IssuerSecretKey, PersistentKey};
use crate::primitives::PkeError;
use crate::wire::WireError;
use crate::zkp::{self, Crs, ZkError};

/// Comments per user and day.
pub const DEFAULT_TAU: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("threshold must be at least 1")]
    ZeroThreshold,
    #[error(transparent)]
    Daa(#[from] DaaError),
    #[error(transparent)]
    Zk(#[from] ZkError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Decrypt(#[from] PkeError),
}

/// Base mode trusts the issuer; extended mode attaches membership proofs
/// over verifier-attested genesis pseudonyms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Base,
    Extended,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    pub security_level: u32,
    pub gpk1: PersistentKey,
    pub crs: Crs,
    pub tau: u32,
}

impl SchemeParams {
    pub fn with_tau(mut self, tau: u32) -> Result<Self, SchemeError> {
        if tau == 0 {
            return Err(SchemeError::ZeroThreshold);
        }
        self.tau = tau;
        Ok(self)
    }
}

pub fn setup(security_level: u32) -> Result<SchemeParams, SchemeError> {
    Ok(SchemeParams {
        security_level,
        gpk1: daa::setup1(security_level)?,
        crs: zkp::zk_setup(security_level)?,
        tau: DEFAULT_TAU,
    })
}

pub fn keygen<R: RngCore + CryptoRng>(
    params: &SchemeParams,
    epoch: Epoch,
    rng: &mut R,
) -> (IssuerPublicKey, IssuerSecretKey) {
    daa::setup2(&params.gpk1, epoch, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::thread_rng;

    #[test]
    fn setup_is_deterministic_with_default_threshold() {
        let a = setup(128).unwrap();
        assert_eq!(a, setup(128).unwrap());
        assert_eq!(a.tau, 20);
        assert_eq!(a.clone().with_tau(0), Err(SchemeError::ZeroThreshold));
        assert_eq!(a.with_tau(3).unwrap().tau, 3);
        assert!(setup(127).is_err());
    }

    #[test]
    fn keygen_shares_persistent_half() {
        let params = setup(128).unwrap();
        let mut rng = thread_rng();
        let (pk1, sk1) = keygen(&params, 1, &mut rng);
        let (pk2, _) = keygen(&params, 1, &mut rng);
        assert_eq!(pk1.gpk1, pk2.gpk1);
        assert_ne!(pk1.gpk2, pk2.gpk2);
        assert!(daa::check_key_pair(&pk1, &sk1));
        let pk_round = IssuerPublicKey::from_bytes(&pk1.to_bytes()).unwrap();
        let sk_round = IssuerSecretKey::from_bytes(&sk1.to_bytes()).unwrap();
        assert!(daa::check_key_pair(&pk_round, &sk_round));
    }
}
