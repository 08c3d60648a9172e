use std::process::Command;

use proptest::prelude::*;
use tt_core::scheme::Mode;
use tt_harness::{
    cost_report, estimate_cores, fcfs, precompute, simulate, CostModel, Deployment, JobKind,
    Outcome, PrecomputeConfig, SimReport, TrafficEvent,
};
use tt_ledger::{Ledger, SharedLedger};
use tt_server::{ledger_api, spawn_local, LedgerClient};

fn ev(t: f64, u: &str, m: &str) -> TrafficEvent {
    TrafficEvent {
        t,
        u: u.into(),
        m: m.into(),
    }
}

fn cfg(seed: u64) -> PrecomputeConfig {
    PrecomputeConfig {
        seed,
        anonymity_set: 8,
        ..PrecomputeConfig::default()
    }
}

#[test]
fn issuing_happens_once_per_user() {
    let dep = Deployment::new(20, Mode::Base, 1).unwrap();
    let events = [ev(1.0, "alice", "a"), ev(2.0, "alice", "b")];
    let p = precompute(&events, &dep, &cfg(1)).unwrap();
    assert_eq!((p.users, p.issue_user.len(), p.issue_issuer.len(), p.genesis.len()), (1, 1, 1, 1));
    assert_eq!(p.comment.len(), 2);
    // Only the first event pays for issuing.
    let first = &p.jobs[0];
    assert!(first.arrival >= 1.0 + p.issue_user[0] + p.issue_issuer[0] + p.comment[0] - 1e-12);
    assert!((p.jobs[1].arrival - (2.0 + p.comment[1])).abs() < 1e-12);
}

#[test]
fn posts_beyond_tau_are_marked() {
    let tau = 3;
    let dep = Deployment::new(tau, Mode::Base, 2).unwrap();
    let mut events: Vec<_> = (0..=tau).map(|i| ev(i as f64 * 10.0, "bob", "hi")).collect();
    // Next day the counter starts over.
    events.push(ev(86_400.0 + 5.0, "bob", "again"));
    let p = precompute(&events, &dep, &cfg(2)).unwrap();
    let over: Vec<usize> = p
        .jobs
        .iter()
        .filter(|j| matches!(j.kind, JobKind::OverThreshold))
        .map(|j| j.event)
        .collect();
    assert_eq!(over, vec![tau as usize]);
    let seqs: Vec<u32> = p
        .jobs
        .iter()
        .filter_map(|j| match &j.kind {
            JobKind::Comment { entry, .. } => Some(entry.dom.seq),
            JobKind::OverThreshold => None,
        })
        .collect();
    assert_eq!(seqs, vec![1, 2, 3, 1]);
}

#[test]
fn commenting_time_is_measured() {
    let dep = Deployment::new(20, Mode::Base, 3).unwrap();
    let events: Vec<_> = (0..1000).map(|i| ev(i as f64, &format!("u{}", i % 100), "text")).collect();
    let p = precompute(&events, &dep, &cfg(3)).unwrap();
    let run = simulate(&p, 1, &SharedLedger::default(), &dep.website(), 0.1).unwrap();
    let c = run.report.comment;
    assert_eq!(c.count, 1000);
    assert!(c.mean.is_finite() && c.mean > 0.0 && c.variance >= 0.0);
    println!("commenting mean {:.4}s median {:.4}s", c.mean, c.median);
}

#[test]
fn empty_replay_echoes_cores() {
    let dep = Deployment::new(20, Mode::Base, 4).unwrap();
    let p = precompute(&[], &dep, &cfg(4)).unwrap();
    let run = simulate(&p, 5, &SharedLedger::default(), &dep.website(), 0.1).unwrap();
    assert_eq!(run.report.cores, 5);
    assert_eq!(run.report.outcomes.total(), 0);
    assert_eq!(run.report.ledger_bytes, 0);
    assert_eq!(cost_report(&run.report, &CostModel::default()).cents, 0);
    assert!(simulate(&p, 0, &SharedLedger::default(), &dep.website(), 0.1).is_err());
}

#[test]
fn injected_duplicate_is_rejected() {
    let dep = Deployment::new(20, Mode::Extended, 5).unwrap();
    let events = [ev(1.0, "carol", "one"), ev(2.0, "dave", "two")];
    let mut p = precompute(&events, &dep, &cfg(5)).unwrap();
    let mut again = p.jobs[0].clone();
    again.event = 99;
    again.arrival += 10.0;
    p.jobs.push(again);
    let run = simulate(&p, 2, &SharedLedger::default(), &dep.website(), 0.1).unwrap();
    let o = run.report.outcomes;
    assert_eq!((o.published, o.duplicate, o.total()), (2, 1, 3));
    assert_eq!(run.outcomes.last().unwrap().outcome, Outcome::Duplicate);
}

#[test]
fn tampered_entry_is_invalid() {
    let dep = Deployment::new(20, Mode::Base, 6).unwrap();
    let mut p = precompute(&[ev(1.0, "erin", "hello")], &dep, &cfg(6)).unwrap();
    if let JobKind::Comment { m, .. } = &mut p.jobs[0].kind {
        m.push(b'!');
    }
    let run = simulate(&p, 1, &SharedLedger::default(), &dep.website(), 0.1).unwrap();
    assert_eq!(run.report.outcomes.invalid, 1);
}

fn small_dataset(seed: u64, n: usize, users: usize) -> Vec<TrafficEvent> {
    let mut events = tt_harness::gen_synthetic(users, n, seed);
    for e in &mut events {
        e.u = e.u.replace("[deleted]", "__deleted__");
    }
    events
}

#[test]
fn scheduling_is_deterministic() {
    let events = small_dataset(7, 60, 6);
    let partition = |cores: usize| {
        let dep = Deployment::new(4, Mode::Extended, 7).unwrap();
        let p = precompute(&events, &dep, &cfg(7)).unwrap();
        let run = simulate(&p, cores, &SharedLedger::default(), &dep.website(), 0.1).unwrap();
        (run.outcomes, run.report.outcomes)
    };
    let (a, counts) = partition(1);
    assert!(counts.over_threshold > 0 && counts.published > 0);
    assert_eq!(partition(1).0, a);
    assert_eq!(partition(3).0, a);
}

#[test]
fn ledger_bytes_match_counter_embedded_and_remote() {
    let events = small_dataset(8, 30, 5);
    let dep = Deployment::new(20, Mode::Extended, 8).unwrap();
    let embedded = SharedLedger::default();
    let p = precompute(&events, &dep, &cfg(8)).unwrap();
    let r = simulate(&p, 2, &embedded, &dep.website(), 0.1).unwrap().report;
    assert_eq!(r.ledger_bytes, r.ledger_bytes_counter);
    assert_eq!(r.ledger_bytes, embedded.bytes_appended());
    assert!(r.mean_entry_bytes > 0.0);

    let addr = spawn_local(ledger_api::router(SharedLedger::from(Ledger::in_memory()))).unwrap();
    let client = LedgerClient::new(&format!("http://{addr}"));
    let remote = simulate(&p, 2, &client, &dep.website(), 0.1).unwrap().report;
    assert_eq!(remote.ledger_bytes, remote.ledger_bytes_counter);
    assert_eq!(remote.outcomes, r.outcomes);
    // A second replay prepared for an empty ledger is refused.
    assert!(simulate(&p, 1, &client, &dep.website(), 0.1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn outcomes_are_conserved(seed in 0u64..1000, n in 0usize..25, users in 1usize..5, tau in 1u32..4) {
        let events = small_dataset(seed, n, users);
        let dep = Deployment::new(tau, Mode::Base, seed).unwrap();
        let p = precompute(&events, &dep, &cfg(seed)).unwrap();
        let r = simulate(&p, 1 + (seed % 3) as usize, &SharedLedger::default(), &dep.website(), 0.1).unwrap().report;
        prop_assert_eq!(r.outcomes.total(), n);
        prop_assert!((0.0..=1.0).contains(&r.fraction_under_target));
        prop_assert!(r.verify.mean >= 0.0 && r.latency.mean >= 0.0 && r.max_latency >= 0.0);
    }

    #[test]
    fn fcfs_respects_arrivals_and_capacity(
        jobs in prop::collection::vec((0u32..1000, 1u32..50), 1..40),
        cores in 1usize..5,
    ) {
        let mut jobs = jobs;
        jobs.sort();
        let arrivals: Vec<f64> = jobs.iter().map(|j| j.0 as f64 / 100.0).collect();
        let service: Vec<f64> = jobs.iter().map(|j| j.1 as f64 / 100.0).collect();
        let finish = fcfs(&arrivals, &service, cores);
        for i in 0..finish.len() {
            prop_assert!(finish[i] >= arrivals[i] + service[i] - 1e-9);
            // At the start of job i at most `cores` jobs are in service.
            let start = finish[i] - service[i];
            let running = (0..finish.len())
                .filter(|&j| finish[j] - service[j] <= start + 1e-9 && finish[j] > start + 1e-9)
                .count();
            prop_assert!(running <= cores);
        }
        let more = fcfs(&arrivals, &service, cores + 1);
        prop_assert!(more.iter().zip(&finish).all(|(m, f)| *m <= f + 1e-9));
    }
}

#[test]
fn burst_core_estimates_match_brute_force() {
    // Frozen from an independent discrete-event simulation with exact rationals.
    let arrivals = [0.0, 0.0, 0.02, 0.03, 0.03, 0.05];
    assert_eq!(estimate_cores(&arrivals, 0.03, 0.1), 2);
    assert_eq!(estimate_cores(&arrivals, 0.05, 0.1), 3);
    assert_eq!(estimate_cores(&[0.0, 0.0, 0.0, 0.01, 0.01, 0.5], 0.04, 0.1), 3);
}

#[test]
fn paper_cost_figures() {
    let model = CostModel::default();
    let day = |cores| SimReport {
        cores,
        running_seconds: 24.0 * 3600.0,
        ..SimReport::default()
    };
    assert_eq!(cost_report(&day(3), &model).to_string(), "$3.60");
    assert_eq!(cost_report(&day(1), &model).to_string(), "$1.20");
    assert_eq!(cost_report(&SimReport::default(), &model).to_string(), "$0.00");
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ttsim");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"t\": 1, \"u\": \"a\", \"m\": \"x\"}\nnot json\n").unwrap();
    let out = Command::new(bin).args(["run", "--dataset"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let data = dir.path().join("d.jsonl");
    let status = Command::new(bin)
        .args(["gen-synthetic", "--users", "5", "--comments", "12", "--out"])
        .arg(&data)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(bin)
        .args(["run", "--latency-target", "0", "--dataset"])
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).args(["run", "--cores", "0", "--dataset"]).arg(&data).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let report = dir.path().join("r.json");
    let out = Command::new(bin)
        .args(["run", "--base", "--cores", "2", "--tau", "5", "--dataset"])
        .arg(&data)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: SimReport = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!((r.events, r.cores, r.mode.as_str()), (12, 2, "base"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verification"));

    let out = Command::new(bin)
        .args(["estimate-cores", "--service-time", "0.03", "--dataset"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("cores 1"));
}
