use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use parking_lot::Mutex;
use tt_core::audit::{CredentialStore, Issuer, IssuerClaim, SessionId};
use tt_core::primitives::Digest;
use tt_core::scheme::JoinRequest;

use crate::api::*;
use crate::error::ApiError;

/// Issuer service state. Credentials and epoch announcements go to `store`.
pub struct IssuerApp<S> {
    pub issuer: Mutex<Issuer>,
    pub store: S,
}

impl<S> IssuerApp<S> {
    pub fn new(issuer: Issuer, store: S) -> Arc<Self> {
        Arc::new(IssuerApp {
            issuer: Mutex::new(issuer),
            store,
        })
    }
}

pub fn router<S>(app: Arc<IssuerApp<S>>) -> Router
where
    S: CredentialStore + Send + Sync + 'static,
{
    Router::new()
        .route("/public-key", get(public_key::<S>))
        .route("/verifiers", post(accredit::<S>))
        .route("/sessions", post(open_session::<S>))
        .route("/sessions/{sid}/commit", post(commit::<S>))
        .route("/sessions/{sid}/psi", post(accept::<S>))
        .route("/sessions/{sid}/join", post(join::<S>))
        .route("/claims/{c_i}", get(claim::<S>))
        .route("/epoch/rollover", post(rollover::<S>))
        .with_state(app)
}

fn now() -> u64 {
    chrono::Utc::now().timestamp().max(0) as u64
}

fn parse_sid(s: &str) -> Result<SessionId, ApiError> {
    hex::decode(s)
        .ok()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| ApiError::bad_request("session id must be 64 hex digits"))
}

/// Runs issuer work off the async executor; the store may block on I/O.
async fn blocking<S, T>(
    app: Arc<IssuerApp<S>>,
    f: impl FnOnce(&IssuerApp<S>) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError>
where
    S: Send + Sync + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&app))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

async fn public_key<S: Send + Sync + 'static>(State(app): State<Arc<IssuerApp<S>>>) -> Json<IssuerKeyResponse> {
    let issuer = app.issuer.lock();
    let pk = issuer.public_key();
    Json(IssuerKeyResponse {
        epoch: pk.epoch(),
        issuer_key: pk.to_bytes(),
        verify_key: issuer.verify_key(),
        audit_bits: issuer.audit_params().bits(),
    })
}

async fn accredit<S: Send + Sync + 'static>(
    State(app): State<Arc<IssuerApp<S>>>,
    Json(req): Json<AccreditRequest>,
) -> StatusCode {
    app.issuer.lock().accredit(req.verify_key);
    StatusCode::NO_CONTENT
}

async fn open_session<S: Send + Sync + 'static>(State(app): State<Arc<IssuerApp<S>>>) -> Json<SessionResponse> {
    let sid = app.issuer.lock().open_session(now(), &mut rand::thread_rng());
    Json(SessionResponse { sid })
}

async fn commit<S: Send + Sync + 'static>(
    State(app): State<Arc<IssuerApp<S>>>,
    Path(sid): Path<String>,
    Json(req): Json<CommitRequest>,
) -> Result<Json<CommitResponse>, ApiError> {
    let sid = parse_sid(&sid)?;
    let commitment = app
        .issuer
        .lock()
        .commit(&sid, &req.user_hash, now(), &mut rand::thread_rng())?;
    Ok(Json(commitment))
}

async fn accept<S: Send + Sync + 'static>(
    State(app): State<Arc<IssuerApp<S>>>,
    Path(sid): Path<String>,
    Json(req): Json<PsiRequest>,
) -> Result<Json<PsiResponse>, ApiError> {
    let sid = parse_sid(&sid)?;
    let audited = app
        .issuer
        .lock()
        .accept(&sid, &req.c_i, &req.psi, &req.pk_v, now())?;
    Ok(Json(PsiResponse { audited }))
}

async fn join<S>(
    State(app): State<Arc<IssuerApp<S>>>,
    Path(sid): Path<String>,
    Json(body): Json<JoinBody>,
) -> Result<Json<JoinResponse>, ApiError>
where
    S: CredentialStore + Send + Sync + 'static,
{
    let sid = parse_sid(&sid)?;
    let req = JoinRequest::from_bytes(&body.request)?;
    blocking(app, move |app| {
        let (cred, epoch) = {
            let mut issuer = app.issuer.lock();
            let cred = issuer.join(&sid, &body.login, &req, now(), &mut rand::thread_rng())?;
            (cred, issuer.public_key().epoch())
        };
        app.store
            .put_credential(&body.login, epoch, &cred)
            .map_err(|e| ApiError::internal(format!("storing credential: {e}")))?;
        Ok(Json(JoinResponse {
            epoch,
            credential: cred.to_bytes(),
        }))
    })
    .await
}

async fn claim<S: Send + Sync + 'static>(
    State(app): State<Arc<IssuerApp<S>>>,
    Path(c_i): Path<String>,
) -> Result<Json<IssuerClaim>, ApiError> {
    let c_i = Digest::from_hex(&c_i).ok_or_else(|| ApiError::bad_request("c_I must be 64 hex digits"))?;
    Ok(Json(app.issuer.lock().claim(&c_i)?))
}

async fn rollover<S>(
    State(app): State<Arc<IssuerApp<S>>>,
    Json(req): Json<RolloverRequest>,
) -> Result<Json<RolloverResponse>, ApiError>
where
    S: CredentialStore + Send + Sync + 'static,
{
    blocking(app, move |app| {
        let outcome = app
            .issuer
            .lock()
            .epoch_rollover(&app.store, &req.reports, &mut rand::thread_rng())
            .map_err(|e| ApiError::internal(format!("rollover: {e}")))?;
        Ok(Json(RolloverResponse {
            epoch: outcome.epoch,
            reissued: outcome.reissued,
            skipped: outcome
                .skipped
                .into_iter()
                .map(|(c_i, reason)| SkippedReport {
                    c_i,
                    reason: format!("{reason:?}"),
                })
                .collect(),
        }))
    })
    .await
}
