use std::sync::Arc;

use axum::extract::{Path, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use tt_core::audit::{UpdateReport, Verifier, VerifierEvidence};
use tt_core::primitives::Digest;

use crate::api::*;
use crate::error::ApiError;

pub fn router(verifier: Arc<Verifier>) -> Router {
    Router::new()
        .route("/attest", post(attest))
        .route("/audits/{c_i}", get(audit))
        .route("/update-reports", get(update_reports))
        .with_state(verifier)
}

async fn attest(
    State(v): State<Arc<Verifier>>,
    Json(req): Json<AttestRequest>,
) -> Result<Json<AttestResponse>, ApiError> {
    let psi = v.attest(&req.nbd, &req.r_u, &req.commitment, &req.evidence)?;
    Ok(Json(AttestResponse {
        psi,
        pk_v: v.verify_key(),
    }))
}

async fn audit(
    State(v): State<Arc<Verifier>>,
    Path(c_i): Path<String>,
) -> Result<Json<VerifierEvidence>, ApiError> {
    let c_i = Digest::from_hex(&c_i).ok_or_else(|| ApiError::bad_request("c_I must be 64 hex digits"))?;
    v.respond_audit(&c_i)
        .map(Json)
        .ok_or_else(|| ApiError::not_found("no archived verification for this commitment"))
}

/// Reports for every archived registration; revocation policy lives outside.
async fn update_reports(State(v): State<Arc<Verifier>>) -> Json<Vec<UpdateReport>> {
    Json(v.update_reports(|_| true))
}
