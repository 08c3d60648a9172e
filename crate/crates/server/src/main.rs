use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use tokio::net::TcpListener;
use tracing_subscriber::EnvFilter;
use tt_core::audit::{AuditParams, Issuer, Verifier, DEFAULT_AUDIT_BITS};
use tt_core::primitives::{sig_keygen, VerifyKey};
use tt_core::scheme;
use tt_ledger::{Ledger, SharedLedger};
use tt_server::{issuer_api, ledger_api, verifier_api, IssuerClient, LedgerClient};

#[derive(Parser)]
#[command(name = "tt-server", about = "Ledger, issuer and verifier services")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the append-only ledger.
    Ledger {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Journal file; the ledger is kept in memory only when omitted.
        #[arg(long)]
        journal: Option<PathBuf>,
    },
    /// Serve the issuer, storing credentials on a remote ledger.
    Issuer {
        #[arg(long, default_value = "127.0.0.1:8081")]
        listen: SocketAddr,
        #[arg(long)]
        ledger: String,
        #[arg(long, default_value_t = 1)]
        epoch: u64,
        #[arg(long, default_value_t = DEFAULT_AUDIT_BITS)]
        audit_bits: u32,
        /// Hex verifier keys to accredit at startup.
        #[arg(long = "accredit")]
        accredited: Vec<String>,
    },
    /// Serve an identity verifier vouching for users to the issuer.
    Verifier {
        #[arg(long, default_value = "127.0.0.1:8082")]
        listen: SocketAddr,
        /// Issuer base URL, used to fetch its signature key.
        #[arg(long)]
        issuer: String,
    },
}

type CliResult<T> = Result<T, String>;

fn parse_verify_key(s: &str) -> CliResult<VerifyKey> {
    let bytes = hex::decode(s).map_err(|e| format!("verifier key {s:?}: {e}"))?;
    let arr: [u8; 32] = bytes
        .try_into()
        .map_err(|_| format!("verifier key {s:?} must be 32 bytes"))?;
    Ok(VerifyKey(arr))
}

fn run(cli: Cli) -> CliResult<()> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    match cli.command {
        Command::Ledger { listen, journal } => {
            let ledger = match &journal {
                Some(path) => Ledger::open(path).map_err(|e| format!("opening journal: {e}"))?,
                None => Ledger::in_memory(),
            };
            tracing::info!(entries = ledger.len(), %listen, "ledger ready");
            let router = ledger_api::router(SharedLedger::from(ledger));
            runtime.block_on(async {
                let listener = TcpListener::bind(listen).await.map_err(|e| e.to_string())?;
                tt_server::serve(listener, router).await.map_err(|e| e.to_string())
            })
        }
        Command::Issuer {
            listen,
            ledger,
            epoch,
            audit_bits,
            accredited,
        } => {
            let params = scheme::setup(128).map_err(|e| e.to_string())?;
            let audit = AuditParams::new(audit_bits).map_err(|e| e.to_string())?;
            let mut issuer = Issuer::new(params, epoch, &mut rand::thread_rng()).with_audit_params(audit);
            for key in &accredited {
                issuer.accredit(parse_verify_key(key)?);
            }
            let store = LedgerClient::new(&ledger);
            let current = store.current_epoch().map_err(|e| e.to_string())?.map(|(e, _)| e);
            if let Some(current) = current.filter(|c| *c >= epoch) {
                return Err(format!("ledger is already at epoch {current}; start with a later --epoch"));
            }
            store
                .announce_epoch(epoch, issuer.public_key())
                .map_err(|e| format!("announcing epoch: {e}"))?;
            println!("issuer verify key {}", hex::encode(issuer.verify_key().0));
            let app = issuer_api::IssuerApp::new(issuer, store);
            let router = issuer_api::router(app.clone());
            let result = runtime.block_on(async {
                let listener = TcpListener::bind(listen).await.map_err(|e| e.to_string())?;
                tt_server::serve(listener, router).await.map_err(|e| e.to_string())
            });
            // The blocking client must be dropped outside the runtime.
            drop(runtime);
            drop(app);
            result
        }
        Command::Verifier { listen, issuer } => {
            let (_, issuer_vk, _) = IssuerClient::new(&issuer)
                .public_key()
                .map_err(|e| format!("fetching issuer key: {e}"))?;
            let keys = sig_keygen(&mut rand::thread_rng());
            println!("verifier key {}", hex::encode(keys.verify_key.0));
            let verifier = Arc::new(Verifier::new(keys, issuer_vk));
            let router = verifier_api::router(verifier);
            runtime.block_on(async {
                let listener = TcpListener::bind(listen).await.map_err(|e| e.to_string())?;
                tt_server::serve(listener, router).await.map_err(|e| e.to_string())
            })
        }
    }
}

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
