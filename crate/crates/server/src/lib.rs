//! HTTP front ends for the ledger, issuer and verifier, plus blocking clients.
//!
//! Bodies are JSON with base64 binary fields; digests, session ids and
//! pseudonyms in paths are hex. Errors come back as `{code, message}`.

pub mod api;
pub mod client;
mod error;
pub mod issuer_api;
pub mod ledger_api;
pub mod verifier_api;

use std::net::SocketAddr;

use axum::Router;
use tokio::net::TcpListener;

pub use client::{ClientError, IssuerClient, LedgerClient, RemotePeriod, VerifierClient};
pub use error::ApiError;

/// Serves `router` until the process receives Ctrl-C.
pub async fn serve(listener: TcpListener, router: Router) -> std::io::Result<()> {
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Binds an ephemeral local port and serves `router` on a background thread.
/// Intended for tests and embedded use.
pub fn spawn_local(router: Router) -> std::io::Result<SocketAddr> {
    let std_listener = std::net::TcpListener::bind("127.0.0.1:0")?;
    std_listener.set_nonblocking(true)?;
    let addr = std_listener.local_addr()?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()?;
    std::thread::spawn(move || {
        runtime.block_on(async move {
            let listener = TcpListener::from_std(std_listener).expect("listener from std");
            if let Err(e) = axum::serve(listener, router).await {
                tracing::error!(error = %e, "local server stopped");
            }
        })
    });
    Ok(addr)
}
