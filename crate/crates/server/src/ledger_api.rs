use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::NaiveDate;
use tt_core::daa::IssuerPublicKey;
use tt_core::primitives::{decode_g1, Digest};
use tt_ledger::SharedLedger;

use crate::api::*;
use crate::error::ApiError;

const MAX_GENESIS_PAGE: usize = 1000;

pub fn router(ledger: SharedLedger) -> Router {
    Router::new()
        .route("/entries", post(append))
        .route("/entries/{index}", get(entry))
        .route("/head", get(head))
        .route("/nyms/{nym}", get(nym_count))
        .route("/nyms/{nym}/register", post(register_nym))
        .route("/credentials/{login}", get(credential))
        .route("/updates/{login}", get(update_message))
        .route("/genesis", get(genesis))
        .route("/genesis/stats", get(stats))
        .route("/epoch", get(current_epoch).post(announce_epoch))
        .with_state(ledger)
}

fn parse_nym(hex_nym: &str) -> Result<ark_bn254::G1Affine, ApiError> {
    let bytes = hex::decode(hex_nym).map_err(|e| ApiError::bad_request(format!("nym: {e}")))?;
    decode_g1(&bytes).map_err(|e| ApiError::bad_request(format!("nym: {e}")))
}

fn parse_login(hex_login: &str) -> Result<Digest, ApiError> {
    Digest::from_hex(hex_login).ok_or_else(|| ApiError::bad_request("login digest must be 64 hex digits"))
}

fn parse_period(q: &PeriodQuery, ledger: &SharedLedger) -> Result<NaiveDate, ApiError> {
    match &q.period {
        Some(p) => p
            .parse()
            .map_err(|e| ApiError::bad_request(format!("period: {e}"))),
        None => Ok(ledger.read().today()),
    }
}

async fn append(
    State(ledger): State<SharedLedger>,
    Json(req): Json<AppendRequest>,
) -> Result<Json<IndexResponse>, ApiError> {
    let index = tokio::task::spawn_blocking(move || ledger.append(req.kind, req.payload))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(IndexResponse { index }))
}

async fn entry(
    State(ledger): State<SharedLedger>,
    Path(index): Path<u64>,
) -> Result<Json<EntryResponse>, ApiError> {
    let l = ledger.read();
    let e = l
        .entry(index)
        .ok_or_else(|| ApiError::not_found(format!("no entry {index}")))?;
    Ok(Json(EntryResponse {
        index: e.index,
        kind: e.kind,
        timestamp: e.timestamp,
        payload: e.payload.clone(),
        payload_hash: e.payload_hash,
        digest: e.digest,
    }))
}

async fn head(State(ledger): State<SharedLedger>) -> Json<HeadResponse> {
    let l = ledger.read();
    Json(HeadResponse {
        len: l.len(),
        head: l.head(),
        bytes_appended: l.bytes_appended(),
    })
}

async fn nym_count(
    State(ledger): State<SharedLedger>,
    Path(nym): Path<String>,
    Query(q): Query<PeriodQuery>,
) -> Result<Json<CountResponse>, ApiError> {
    let nym = parse_nym(&nym)?;
    let count = match q.period {
        Some(_) => ledger.read().nym_count_in(parse_period(&q, &ledger)?, &nym),
        None => ledger.nym_count(&nym),
    };
    Ok(Json(CountResponse { count }))
}

async fn register_nym(
    State(ledger): State<SharedLedger>,
    Path(nym): Path<String>,
    Query(q): Query<PeriodQuery>,
) -> Result<Json<FreshResponse>, ApiError> {
    let nym = parse_nym(&nym)?;
    let period = parse_period(&q, &ledger)?;
    let fresh = tokio::task::spawn_blocking(move || ledger.register_nym(period, &nym))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(FreshResponse { fresh }))
}

async fn credential(
    State(ledger): State<SharedLedger>,
    Path(login): Path<String>,
    Query(q): Query<EpochQuery>,
) -> Result<Json<CredentialResponse>, ApiError> {
    let login = parse_login(&login)?;
    let epoch = match q.epoch.or_else(|| ledger.current_epoch()) {
        Some(e) => e,
        None => return Err(ApiError::not_found("no epoch announced")),
    };
    let cred = ledger.get_credential(&login, epoch)?;
    Ok(Json(CredentialResponse {
        login,
        epoch,
        credential: cred.to_bytes(),
    }))
}

async fn update_message(
    State(ledger): State<SharedLedger>,
    Path(login): Path<String>,
) -> Result<Json<UpdateResponse>, ApiError> {
    let login = parse_login(&login)?;
    let u = ledger
        .update_message(&login)
        .ok_or_else(|| ApiError::not_found("no update message for this login"))?;
    Ok(Json(UpdateResponse {
        login,
        message: u.to_bytes(),
    }))
}

async fn genesis(
    State(ledger): State<SharedLedger>,
    Query(q): Query<GenesisQuery>,
) -> Json<GenesisPage> {
    let offset = q.offset.unwrap_or(0);
    let limit = q.limit.unwrap_or(100).min(MAX_GENESIS_PAGE);
    let l = ledger.read();
    Json(GenesisPage {
        total: l.genesis_count(),
        offset,
        tuples: l.list_genesis(offset, limit),
    })
}

async fn stats(State(ledger): State<SharedLedger>) -> Json<StatsResponse> {
    let stats = ledger
        .verifier_stats()
        .into_iter()
        .map(|(pk, n)| (hex::encode(pk.0), n))
        .collect();
    Json(StatsResponse { stats })
}

async fn current_epoch(State(ledger): State<SharedLedger>) -> Json<EpochResponse> {
    let l = ledger.read();
    let epoch = l.current_epoch();
    Json(EpochResponse {
        epoch,
        issuer_key: epoch.and_then(|e| l.issuer_key(e)).map(|pk| pk.to_bytes()),
    })
}

async fn announce_epoch(
    State(ledger): State<SharedLedger>,
    Json(req): Json<EpochRequest>,
) -> Result<Json<IndexResponse>, ApiError> {
    let pk = IssuerPublicKey::from_bytes(&req.issuer_key)
        .map_err(|e| ApiError::bad_request(format!("issuer key: {e}")))?;
    let index = tokio::task::spawn_blocking(move || ledger.announce_epoch(req.epoch, &pk))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(IndexResponse { index }))
}
