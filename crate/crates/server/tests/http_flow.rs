use std::sync::Arc;

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use tt_core::audit::{public_audit_verify, user_begin_with_key, AuditParams, Issuer, Verifier};
use tt_core::daa::{self, MemberSecretKey};
use tt_core::primitives::{hash, pke_keygen, sig_keygen};
use tt_core::scheme::{
    self, comment, encrypt_for_ledger, join_request, make_basename, next_basename, BillingKey,
    CommentEntry, Mode, Verdict, Website,
};
use tt_ledger::{EntryKind, SharedLedger};
use tt_server::api::AttestRequest;
use tt_server::{issuer_api, ledger_api, spawn_local, verifier_api, IssuerClient, LedgerClient, VerifierClient};

struct Services {
    ledger: SharedLedger,
    ledger_client: LedgerClient,
    issuer: IssuerClient,
    verifier: VerifierClient,
}

fn start(rng: &mut ChaCha20Rng) -> Services {
    let ledger = SharedLedger::default();
    let ledger_url = format!("http://{}", spawn_local(ledger_api::router(ledger.clone())).unwrap());
    let ledger_client = LedgerClient::new(&ledger_url);

    let params = scheme::setup(128).unwrap();
    let issuer = Issuer::new(params, 1, rng).with_audit_params(AuditParams::new(0).unwrap());
    ledger.announce_epoch(1, issuer.public_key()).unwrap();
    let issuer_vk = issuer.verify_key();
    let app = issuer_api::IssuerApp::new(issuer, LedgerClient::new(&ledger_url));
    let issuer_url = format!("http://{}", spawn_local(issuer_api::router(app)).unwrap());

    let verifier = Arc::new(Verifier::new(sig_keygen(rng), issuer_vk));
    let verifier_url = format!("http://{}", spawn_local(verifier_api::router(verifier)).unwrap());
    Services {
        ledger,
        ledger_client,
        issuer: IssuerClient::new(&issuer_url),
        verifier: VerifierClient::new(&verifier_url),
    }
}

#[test]
fn end_to_end_over_http() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let s = start(&mut rng);
    let params = scheme::setup(128).unwrap();
    let (pk, issuer_vk, bits) = s.issuer.public_key().unwrap();
    assert_eq!(bits, 0);

    // Identity verification.
    let sk = MemberSecretKey::random(&mut rng);
    let user = user_begin_with_key(sk.clone(), b"alice 1990-01-01", &mut rng);
    let sid = s.issuer.open_session().unwrap();
    let commitment = s.issuer.commit(&sid, &user.user_hash).unwrap();
    let attest = AttestRequest {
        nbd: b"alice 1990-01-01".to_vec(),
        r_u: user.r_u,
        commitment,
        evidence: b"passport scan".to_vec(),
    };
    let att = s.verifier.attest(&attest).unwrap();
    let err = s.issuer.accept(&sid, &commitment.c_i, &att.psi, &att.pk_v).unwrap_err();
    assert_eq!(err.code(), Some("unknown_verifier"));
    s.issuer.accredit(att.pk_v).unwrap();
    // With zero audit bits every session is audited.
    assert!(s.issuer.accept(&sid, &commitment.c_i, &att.psi, &att.pk_v).unwrap());

    // Audit round trip.
    let claim = s.issuer.claim(&commitment.c_i).unwrap();
    let evidence = s.verifier.audit(&commitment.c_i).unwrap();
    let verdict = public_audit_verify(&claim, &att.pk_v, Some(&evidence), AuditParams::new(0).unwrap());
    assert!(verdict.claim_accepted && verdict.verifier_exonerated);

    // Join; the credential lands on the ledger.
    let login = hash([b"alice".as_slice()]);
    let req = join_request(&params, &pk, &sk, &sid, &mut rng).unwrap();
    let cred = s.issuer.join(&sid, &login, &req).unwrap();
    assert!(cred.verify(&pk, &sk));
    assert_eq!(s.ledger_client.get_credential(&login, None).unwrap(), cred);
    let again = s.issuer.join(&sid, &login, &req).unwrap_err();
    assert_eq!(again.code(), Some("wrong_state"));
    let u = daa::user_update_msg(&params.gpk1, &sk, &mut rng).unwrap();
    s.ledger_client.put_update_message(&login, &u).unwrap();

    // Comment through the ledger and a website using remote nym registration.
    let today = NaiveDate::from_ymd_opt(2024, 5, 1).unwrap();
    let billing = pke_keygen(&mut rng);
    let key = BillingKey { pk: billing.public, period: 1 };
    let site = Website::new("example", params.clone(), pk.clone(), billing.secret.clone(), Mode::Base);
    let remote = s.ledger_client.in_period(today);
    let mut published = 0;
    for round in 0..3 {
        // The first two comments use fresh basenames, the third reuses seq 1.
        let dom = match round {
            2 => make_basename(today, 1),
            _ => next_basename(&sk, today, params.tau, &remote).unwrap().unwrap(),
        };
        let (_, rec) = comment(&pk, &sk, &cred, &dom, b"hi", &mut rng).unwrap();
        let entry = CommentEntry {
            ciphertext: encrypt_for_ledger(&key, &rec, &[round as u8; 32]),
            m_digest: rec.m_digest,
            website: "example".into(),
            dom,
            billing_period: 1,
        };
        s.ledger_client.append_comment(&entry).unwrap();
        match site.process(&entry, b"hi", today, None, &remote).unwrap() {
            Verdict::Published(_) => published += 1,
            Verdict::DuplicateNym(_) => assert_eq!(round, 2),
            other => panic!("unexpected verdict {other:?}"),
        }
    }
    assert_eq!(published, 2);
    let head = s.ledger_client.head().unwrap();
    // Epoch, credential, update message and three comments.
    assert_eq!(head.len, 6);
    assert_eq!(head.bytes_appended, s.ledger.bytes_appended());

    // Rollover: the verifier reports the registration and the issuer re-issues.
    let reports = s.verifier.update_reports().unwrap();
    assert_eq!(reports.len(), 1);
    let outcome = s.issuer.rollover(&reports).unwrap();
    assert_eq!((outcome.epoch, outcome.reissued.as_slice()), (2, [login].as_slice()));
    let (epoch, pk2) = s.ledger_client.current_epoch().unwrap().unwrap();
    assert_eq!(epoch, 2);
    let cred2 = s.ledger_client.get_credential(&login, Some(2)).unwrap();
    assert!(cred2.verify(&pk2, &sk));
    assert_eq!(s.issuer.public_key().unwrap().1, issuer_vk);
}

#[test]
fn ledger_errors_map_to_codes() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let s = start(&mut rng);
    let err = |r: Result<_, tt_server::ClientError>| match r {
        Err(tt_server::ClientError::Api { status, code, .. }) => (status, code),
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("expected an error"),
    };
    assert_eq!(
        err(s.ledger_client.get_credential(&hash([b"nobody".as_slice()]), None).map(drop)),
        (404, "not_found".to_string())
    );
    assert_eq!(
        err(s.ledger_client.append(EntryKind::Comment, vec![0; 8]).map(drop)),
        (400, "validation_failed".to_string())
    );
    assert_eq!(
        err(s.ledger_client.append(EntryKind::Genesis, vec![0; 8]).map(drop)),
        (400, "invalid_attestation".to_string())
    );
    let params = scheme::setup(128).unwrap();
    let (old, _) = daa::setup2(&params.gpk1, 1, &mut rng);
    assert_eq!(
        err(s.ledger_client.announce_epoch(1, &old).map(drop)),
        (409, "non_monotone_epoch".to_string())
    );
    assert_eq!(
        err(s.ledger_client.entry(99).map(drop)),
        (404, "not_found".to_string())
    );
    let unknown_sid = [7u8; 32];
    assert_eq!(
        err(s.issuer.commit(&unknown_sid, &hash([b"x".as_slice()])).map(drop)),
        (404, "unknown_session".to_string())
    );
    assert!(s.ledger_client.verifier_stats().unwrap().is_empty());
    assert_eq!(s.ledger_client.list_genesis(0, 10).unwrap().total, 0);
}
