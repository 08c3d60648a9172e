use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use tt_core::audit::{AuditError, IssuerError};
use tt_core::scheme::JoinError;
use tt_ledger::LedgerError;

use crate::api::ErrorBody;

/// Error returned by every handler as `{code, message}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, message = %self.message, "request failed");
        }
        let body = ErrorBody {
            code: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<LedgerError> for ApiError {
    fn from(e: LedgerError) -> Self {
        let (status, code) = match &e {
            LedgerError::ValidationFailed(_) => (StatusCode::BAD_REQUEST, "validation_failed"),
            LedgerError::InvalidAttestation => (StatusCode::BAD_REQUEST, "invalid_attestation"),
            LedgerError::NotFound => (StatusCode::NOT_FOUND, "not_found"),
            LedgerError::DuplicateEpochCredential { .. } => {
                (StatusCode::CONFLICT, "duplicate_epoch_credential")
            }
            LedgerError::NonMonotoneEpoch { .. } => (StatusCode::CONFLICT, "non_monotone_epoch"),
            LedgerError::Corrupt { .. }
            | LedgerError::Replay { .. }
            | LedgerError::Torn { .. }
            | LedgerError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<AuditError> for ApiError {
    fn from(e: AuditError) -> Self {
        let (status, code) = match &e {
            AuditError::UnknownSession => (StatusCode::NOT_FOUND, "unknown_session"),
            AuditError::SessionExpired => (StatusCode::GONE, "session_expired"),
            AuditError::WrongState { .. } => (StatusCode::CONFLICT, "wrong_state"),
            AuditError::SignatureInvalid => (StatusCode::BAD_REQUEST, "signature_invalid"),
            AuditError::UnknownVerifier => (StatusCode::FORBIDDEN, "unknown_verifier"),
            AuditError::SessionMismatch => (StatusCode::CONFLICT, "session_mismatch"),
            AuditError::BadIssuerSignature => (StatusCode::BAD_REQUEST, "bad_issuer_signature"),
            AuditError::IdentityCheckFailed => {
                (StatusCode::UNPROCESSABLE_ENTITY, "identity_check_failed")
            }
            AuditError::InvalidAuditBits(_) => (StatusCode::BAD_REQUEST, "invalid_audit_bits"),
            AuditError::MalformedClaim(_) => (StatusCode::BAD_REQUEST, "malformed_claim"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<JoinError> for ApiError {
    fn from(e: JoinError) -> Self {
        let (status, code) = match &e {
            JoinError::ProofInvalid => (StatusCode::BAD_REQUEST, "proof_invalid"),
            JoinError::NotVerified => (StatusCode::FORBIDDEN, "not_verified"),
            JoinError::AlreadyJoined => (StatusCode::CONFLICT, "already_joined"),
            JoinError::CredentialInvalid => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
            JoinError::GenesisMismatch => (StatusCode::BAD_REQUEST, "genesis_mismatch"),
            JoinError::Daa(_) | JoinError::Zk(_) | JoinError::Wire(_) => {
                (StatusCode::BAD_REQUEST, "bad_request")
            }
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<IssuerError> for ApiError {
    fn from(e: IssuerError) -> Self {
        match e {
            IssuerError::Audit(e) => e.into(),
            IssuerError::Join(e) => e.into(),
        }
    }
}
