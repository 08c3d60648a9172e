use std::convert::Infallible;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ark_bn254::G1Affine;
use chrono::NaiveDate;
use cpu_time::ThreadTime;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use tt_core::daa::MemberSecretKey;
use tt_core::scheme::{
    attest_genesis, comment, comment_extended, genesis_nym, make_basename, CommentEntry,
    GenesisSubset, GenesisTuple, GenesisView, Mode, NymRegistry, Rejection,
    VerificationDb, Verdict, Website,
};
use tt_ledger::{LedgerEntry, SharedLedger};
use tt_server::client::LedgerClient;

use crate::precompute::{Deployment, JobKind, Prepared};
use crate::report::{Outcomes, SimReport, Stats};
use crate::sched::fcfs;
use crate::HarnessError;

/// What the replay needs from a ledger, embedded or remote.
pub trait SimLedger: GenesisView + Sync {
    fn append_comment(&self, entry: &CommentEntry) -> Result<u64, HarnessError>;
    fn append_genesis(&self, gb: &GenesisTuple) -> Result<u64, HarnessError>;
    fn register_nym(&self, period: NaiveDate, nym: &G1Affine) -> Result<bool, HarnessError>;
    fn genesis_count(&self) -> Result<u64, HarnessError>;
    /// Serialized size of entry `index`.
    fn entry_len(&self, index: u64) -> Result<u64, HarnessError>;
    /// The ledger's running total of serialized entry bytes.
    fn bytes_appended(&self) -> Result<u64, HarnessError>;
}

fn ledger_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Ledger(e.to_string())
}

impl SimLedger for SharedLedger {
    fn append_comment(&self, entry: &CommentEntry) -> Result<u64, HarnessError> {
        SharedLedger::append_comment(self, entry).map_err(ledger_err)
    }

    fn append_genesis(&self, gb: &GenesisTuple) -> Result<u64, HarnessError> {
        SharedLedger::append_genesis(self, gb).map_err(ledger_err)
    }

    fn register_nym(&self, period: NaiveDate, nym: &G1Affine) -> Result<bool, HarnessError> {
        SharedLedger::register_nym(self, period, nym).map_err(ledger_err)
    }

    fn genesis_count(&self) -> Result<u64, HarnessError> {
        Ok(self.read().genesis_count() as u64)
    }

    fn entry_len(&self, index: u64) -> Result<u64, HarnessError> {
        self.read()
            .entry(index)
            .map(|e| e.encoded_len() as u64)
            .ok_or_else(|| HarnessError::Ledger(format!("entry {index} missing")))
    }

    fn bytes_appended(&self) -> Result<u64, HarnessError> {
        Ok(SharedLedger::bytes_appended(self))
    }
}

impl SimLedger for LedgerClient {
    fn append_comment(&self, entry: &CommentEntry) -> Result<u64, HarnessError> {
        LedgerClient::append_comment(self, entry).map_err(ledger_err)
    }

    fn append_genesis(&self, gb: &GenesisTuple) -> Result<u64, HarnessError> {
        LedgerClient::append_genesis(self, gb).map_err(ledger_err)
    }

    fn register_nym(&self, period: NaiveDate, nym: &G1Affine) -> Result<bool, HarnessError> {
        LedgerClient::register_nym(self, Some(period), nym).map_err(ledger_err)
    }

    fn genesis_count(&self) -> Result<u64, HarnessError> {
        Ok(self.list_genesis(0, 0).map_err(ledger_err)?.total as u64)
    }

    fn entry_len(&self, index: u64) -> Result<u64, HarnessError> {
        let r = self.entry(index).map_err(ledger_err)?;
        let entry = LedgerEntry {
            index: r.index,
            kind: r.kind,
            timestamp: r.timestamp,
            payload_hash: r.payload_hash,
            payload: r.payload,
            digest: r.digest,
        };
        Ok(entry.encoded_len() as u64)
    }

    fn bytes_appended(&self) -> Result<u64, HarnessError> {
        Ok(self.head().map_err(ledger_err)?.bytes_appended)
    }
}

/// Accepts every pseudonym. Workers verify with it so that the aggregator
/// can register pseudonyms afterwards in dispatch order.
struct Deferred;

impl NymRegistry for Deferred {
    type Error = Infallible;

    fn register_nym(&self, _nym: &G1Affine) -> Result<bool, Infallible> {
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Published,
    Duplicate,
    OverThreshold,
    Invalid(#[serde(with = "rejection_name")] Rejection),
}

mod rejection_name {
    use serde::{Deserialize, Deserializer, Serializer};
    use tt_core::scheme::Rejection;

    const NAMES: [(Rejection, &str); 6] = [
        (Rejection::Basename, "basename"),
        (Rejection::OverThreshold, "over_threshold"),
        (Rejection::Moderation, "moderation"),
        (Rejection::Decrypt, "decrypt"),
        (Rejection::MissingGenesis, "missing_genesis"),
        (Rejection::Signature, "signature"),
    ];

    pub fn serialize<S: Serializer>(r: &Rejection, s: S) -> Result<S::Ok, S::Error> {
        let name = NAMES.iter().find(|(x, _)| x == r).map_or("unknown", |(_, n)| n);
        s.serialize_str(name)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rejection, D::Error> {
        let name = String::deserialize(d)?;
        NAMES
            .iter()
            .find(|(_, n)| *n == name)
            .map(|(r, _)| *r)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown rejection {name}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobOutcome {
    pub event: usize,
    pub outcome: Outcome,
}

#[derive(Clone, Debug)]
pub struct SimRun {
    pub report: SimReport,
    /// In dispatch order.
    pub outcomes: Vec<JobOutcome>,
}

struct Checked {
    verdict: Verdict,
    cpu: f64,
}

/// Replays `prepared` against `ledger` with `cores` workers in virtual time.
///
/// The new genesis tuples and all comment entries are appended first, in
/// dispatch order. Workers then decrypt and verify concurrently, each job
/// timed in thread CPU time. Pseudonyms are registered in dispatch order and
/// finish times come from an FCFS schedule of the measured service times.
pub fn simulate<L: SimLedger>(
    prepared: &Prepared,
    cores: usize,
    ledger: &L,
    site: &Website,
    latency_target: f64,
) -> Result<SimRun, HarnessError> {
    if cores == 0 {
        return Err(HarnessError::Config("cores must be at least 1".into()));
    }
    if !(latency_target > 0.0) {
        return Err(HarnessError::Config("latency target must be positive".into()));
    }
    let have = ledger.genesis_count()?;
    if have != prepared.genesis_base {
        return Err(HarnessError::Config(format!(
            "ledger holds {have} genesis tuples, the replay was prepared for {}",
            prepared.genesis_base
        )));
    }

    let counter_before = ledger.bytes_appended()?;
    let mut ledger_bytes = 0u64;
    for gb in &prepared.genesis {
        let index = ledger.append_genesis(gb)?;
        ledger_bytes += ledger.entry_len(index)?;
    }
    let mut entry_sizes = Vec::new();
    for job in &prepared.jobs {
        if let JobKind::Comment { entry, .. } = &job.kind {
            let index = ledger.append_comment(entry)?;
            ledger_bytes += ledger.entry_len(index)?;
            entry_sizes.push(entry.to_bytes().len() as f64);
        }
    }
    let ledger_bytes_counter = ledger.bytes_appended()? - counter_before;

    let checked = verify_all(prepared, cores, ledger, site);

    let mut outcomes = Vec::with_capacity(prepared.jobs.len());
    let mut counts = Outcomes::default();
    let (mut arrivals, mut service) = (Vec::new(), Vec::new());
    for (job, checked) in prepared.jobs.iter().zip(checked) {
        let outcome = match checked {
            None => Outcome::OverThreshold,
            Some(Checked { verdict, mut cpu }) => {
                let outcome = match verdict {
                    Verdict::Published(nym) | Verdict::DuplicateNym(nym) => {
                        let clock = ThreadTime::now();
                        let fresh = ledger.register_nym(job.period, &nym)?;
                        cpu += clock.elapsed().as_secs_f64();
                        if fresh {
                            Outcome::Published
                        } else {
                            Outcome::Duplicate
                        }
                    }
                    Verdict::Rejected(Rejection::OverThreshold) => Outcome::OverThreshold,
                    Verdict::Rejected(r) => Outcome::Invalid(r),
                };
                arrivals.push(job.arrival);
                service.push(cpu);
                outcome
            }
        };
        match outcome {
            Outcome::Published => counts.published += 1,
            Outcome::Duplicate => counts.duplicate += 1,
            Outcome::OverThreshold => counts.over_threshold += 1,
            Outcome::Invalid(_) => counts.invalid += 1,
        }
        outcomes.push(JobOutcome {
            event: job.event,
            outcome,
        });
    }

    let finish = fcfs(&arrivals, &service, cores);
    let latency: Vec<f64> = finish.iter().zip(&arrivals).map(|(f, a)| f - a).collect();
    let under = latency.iter().filter(|&&l| l <= latency_target).count();
    let first = prepared.jobs.iter().map(|j| j.t).fold(f64::INFINITY, f64::min);
    let last = finish
        .iter()
        .copied()
        .chain(prepared.jobs.iter().map(|j| j.t))
        .fold(f64::NEG_INFINITY, f64::max);

    let report = SimReport {
        mode: mode_name(prepared.mode).to_owned(),
        tau: prepared.tau,
        events: prepared.events,
        users: prepared.users,
        outcomes: counts,
        cores,
        latency_target,
        issue_user: Stats::of(&prepared.issue_user),
        issue_issuer: Stats::of(&prepared.issue_issuer),
        comment: Stats::of(&prepared.comment),
        verify: Stats::of(&service),
        latency: Stats::of(&latency),
        max_latency: latency.iter().copied().fold(0.0, f64::max),
        fraction_under_target: if latency.is_empty() {
            1.0
        } else {
            under as f64 / latency.len() as f64
        },
        genesis_tuples: prepared.genesis.len(),
        ledger_bytes,
        ledger_bytes_counter,
        mean_entry_bytes: Stats::of(&entry_sizes).mean,
        running_seconds: if prepared.jobs.is_empty() { 0.0 } else { last - first },
    };
    Ok(SimRun { report, outcomes })
}

fn verify_all<L: SimLedger>(
    prepared: &Prepared,
    cores: usize,
    ledger: &L,
    site: &Website,
) -> Vec<Option<Checked>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Checked>>> =
        Mutex::new((0..prepared.jobs.len()).map(|_| None).collect());
    let genesis: Option<&(dyn GenesisView + Sync)> = match site.mode() {
        Mode::Base => None,
        Mode::Extended => Some(ledger),
    };
    std::thread::scope(|s| {
        for _ in 0..cores {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = prepared.jobs.get(i) else { break };
                let JobKind::Comment { entry, m } = &job.kind else { continue };
                let clock = ThreadTime::now();
                let Ok(verdict) = site.process(entry, m, job.period, genesis.map(|g| g as &dyn GenesisView), &Deferred);
                let cpu = clock.elapsed().as_secs_f64();
                results.lock().expect("worker panicked")[i] = Some(Checked { verdict, cpu });
            });
        }
    });
    results.into_inner().expect("worker panicked")
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Base => "base",
        Mode::Extended => "extended",
    }
}

/// Median thread CPU time of 32 verifications after a short warm-up.
pub fn sample_service_time(dep: &Deployment, anonymity_set: usize, seed: u64) -> Result<f64, HarnessError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut db = VerificationDb::new();
    let (member, _, _) = dep.enroll(&mut db, "sampled-user", &mut rng)?;
    let mut tuples: Vec<GenesisTuple> = (1..anonymity_set.max(1))
        .map(|_| {
            let sk = MemberSecretKey::random(&mut rng);
            attest_genesis(&dep.verifier.signing_key, &genesis_nym(&sk))
        })
        .collect();
    tuples.push(member.genesis.clone().expect("enrolled with genesis"));
    let subset = GenesisSubset::from_tuples(0, 0, &tuples);
    let site = dep.website();
    let start = NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date");
    let mut samples = Vec::new();
    for i in 0..36u64 {
        let dom = make_basename(start + chrono::Days::new(i), 1);
        let (_, rec) = match dep.mode {
            Mode::Base => comment(&dep.pk, &member.sk, &member.cred, &dom, b"sample", &mut rng)?,
            Mode::Extended => comment_extended(
                &dep.params, &dep.pk, &member.sk, &member.cred, &dom, b"sample", &subset, &mut rng,
            )?,
        };
        let entry = CommentEntry {
            ciphertext: tt_core::scheme::encrypt_for_ledger(&dep.billing_key, &rec, &[7; 32]),
            m_digest: rec.m_digest,
            website: "sample".into(),
            dom,
            billing_period: dep.billing_key.period,
        };
        let view: &dyn GenesisView = &tuples;
        let clock = ThreadTime::now();
        let Ok(verdict) = site.process(&entry, b"sample", dom.date, Some(view), &Deferred);
        let cpu = clock.elapsed().as_secs_f64();
        if !matches!(verdict, Verdict::Published(_)) {
            return Err(HarnessError::Config(format!("sample comment rejected: {verdict:?}")));
        }
        if i >= 4 {
            samples.push(cpu);
        }
    }
    Ok(Stats::of(&samples).median)
}
