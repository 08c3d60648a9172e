use std::collections::HashMap;

use chrono::{Days, NaiveDate};
use cpu_time::ThreadTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use tt_core::daa::{IssuerPublicKey, IssuerSecretKey, MemberSecretKey};
use tt_core::primitives::{hash, pke_keygen, sig_keygen, BoxKeyPair, SigKeyPair};
use tt_core::scheme::{
    self, attest_genesis, comment, comment_extended, encrypt_for_ledger, genesis_nym, issue_user,
    join_request, join_user, make_basename, BillingKey, CommentEntry, GenesisSubset,
    GenesisTuple, Member, Mode, SchemeParams, VerificationDb, Website,
};

use crate::dataset::TrafficEvent;
use crate::HarnessError;

const SITE_ID: &str = "replay-site";

/// Issuer, identity verifier and website keys for one replay.
pub struct Deployment {
    pub params: SchemeParams,
    pub pk: IssuerPublicKey,
    isk: IssuerSecretKey,
    pub billing: BoxKeyPair,
    pub billing_key: BillingKey,
    pub verifier: SigKeyPair,
    pub mode: Mode,
}

impl Deployment {
    pub fn new(tau: u32, mode: Mode, seed: u64) -> Result<Self, HarnessError> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let params = scheme::setup(128)?.with_tau(tau)?;
        let (pk, isk) = scheme::keygen(&params, 1, &mut rng);
        let billing = pke_keygen(&mut rng);
        let billing_key = BillingKey {
            pk: billing.public,
            period: 1,
        };
        Ok(Deployment {
            params,
            pk,
            isk,
            billing,
            billing_key,
            verifier: sig_keygen(&mut rng),
            mode,
        })
    }

    pub fn tau(&self) -> u32 {
        self.params.tau
    }

    pub fn website(&self) -> Website {
        Website::new(
            SITE_ID,
            self.params.clone(),
            self.pk.clone(),
            self.billing.secret.clone(),
            self.mode,
        )
    }

    /// Runs the issuing protocol for a verified user, timing both sides.
    /// Returns the member with its genesis tuple, `delta_issue_u` and
    /// `delta_issue_i`.
    pub fn enroll<R: Rng + rand::CryptoRng>(
        &self,
        db: &mut VerificationDb,
        nickname: &str,
        rng: &mut R,
    ) -> Result<(Member, f64, f64), HarnessError> {
        let login = hash([b"tt-harness-login".as_slice(), nickname.as_bytes()]);
        db.mark_verified(login, self.verifier.verify_key);
        let sk = MemberSecretKey::random(rng);
        let nonce: [u8; 32] = rng.gen();
        let gb = attest_genesis(&self.verifier.signing_key, &genesis_nym(&sk));

        let clock = ThreadTime::now();
        let req = join_request(&self.params, &self.pk, &sk, &nonce, rng)?;
        let mut user = clock.elapsed().as_secs_f64();

        let clock = ThreadTime::now();
        let cred = issue_user(&self.params, &self.pk, &self.isk, db, &login, &nonce, &req, rng)?;
        let issuer = clock.elapsed().as_secs_f64();

        let clock = ThreadTime::now();
        let member = join_user(&self.pk, sk, cred, Some(gb))?;
        user += clock.elapsed().as_secs_f64();
        Ok((member, user, issuer))
    }
}

#[derive(Clone, Debug)]
pub struct PrecomputeConfig {
    /// Date of `t = 0`; commenting periods are whole days from here.
    pub base_date: NaiveDate,
    /// Genesis pseudonyms per membership proof in extended mode.
    pub anonymity_set: usize,
    /// Genesis tuples already on the ledger before this replay.
    pub genesis_base: u64,
    pub seed: u64,
}

impl Default for PrecomputeConfig {
    fn default() -> Self {
        PrecomputeConfig {
            base_date: NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date"),
            anonymity_set: 64,
            genesis_base: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum JobKind {
    Comment { entry: CommentEntry, m: Vec<u8> },
    /// The user already posted `tau` times this period; nothing is signed.
    OverThreshold,
}

#[derive(Clone, Debug)]
pub struct PreparedJob {
    /// Row number in the sorted dataset.
    pub event: usize,
    pub t: f64,
    /// `t` plus commenting time plus, on the user's first event, issuing time.
    pub arrival: f64,
    pub period: NaiveDate,
    pub kind: JobKind,
}

/// Precomputed replay input, jobs ordered by arrival then dataset order.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub mode: Mode,
    pub tau: u32,
    pub events: usize,
    pub users: usize,
    pub jobs: Vec<PreparedJob>,
    /// New genesis tuples in user order, to be appended at `genesis_base`.
    pub genesis: Vec<GenesisTuple>,
    pub genesis_base: u64,
    pub issue_user: Vec<f64>,
    pub issue_issuer: Vec<f64>,
    pub comment: Vec<f64>,
}

pub fn period_of(base: NaiveDate, t: f64) -> NaiveDate {
    base + Days::new((t / 86_400.0).floor() as u64)
}

/// Genesis window of at most `k` entries that contains `own`: the latest `k`
/// entries when `own` is among them, otherwise the `k` entries from `own` on.
pub fn genesis_window(own: usize, count: usize, k: usize) -> (usize, usize) {
    let start = own.min(count.saturating_sub(k.max(1)));
    (start, (start + k.max(1)).min(count))
}

/// Simulates issuing on each user's first appearance and commenting for
/// every event, measuring thread CPU time for each step.
pub fn precompute(
    events: &[TrafficEvent],
    dep: &Deployment,
    cfg: &PrecomputeConfig,
) -> Result<Prepared, HarnessError> {
    if dep.mode == Mode::Extended && cfg.anonymity_set == 0 {
        return Err(HarnessError::Config("anonymity set must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut db = VerificationDb::new();
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut members: Vec<Member> = Vec::new();
    let mut posted: HashMap<(usize, NaiveDate), u32> = HashMap::new();
    let mut out = Prepared {
        mode: dep.mode,
        tau: dep.tau(),
        events: events.len(),
        users: 0,
        jobs: Vec::with_capacity(events.len()),
        genesis: Vec::new(),
        genesis_base: cfg.genesis_base,
        issue_user: Vec::new(),
        issue_issuer: Vec::new(),
        comment: Vec::new(),
    };

    for (index, ev) in events.iter().enumerate() {
        let period = period_of(cfg.base_date, ev.t);
        let mut arrival = ev.t;
        let uid = match ids.get(ev.u.as_str()) {
            Some(&uid) => uid,
            None => {
                let (member, du, di) = dep.enroll(&mut db, &ev.u, &mut rng)?;
                out.issue_user.push(du);
                out.issue_issuer.push(di);
                arrival += du + di;
                out.genesis.push(member.genesis.clone().expect("enrolled with genesis"));
                members.push(member);
                ids.insert(&ev.u, members.len() - 1);
                members.len() - 1
            }
        };
        let seq = posted.entry((uid, period)).or_default();
        *seq += 1;
        if *seq > dep.tau() {
            out.jobs.push(PreparedJob {
                event: index,
                t: ev.t,
                arrival,
                period,
                kind: JobKind::OverThreshold,
            });
            continue;
        }

        let member = &members[uid];
        let dom = make_basename(period, *seq);
        let m = ev.m.as_bytes();
        let r: [u8; 32] = rng.gen();
        let subset = (dep.mode == Mode::Extended).then(|| {
            let (start, end) = genesis_window(uid, out.genesis.len(), cfg.anonymity_set);
            GenesisSubset::from_tuples(cfg.genesis_base + start as u64, ev.t as i64, &out.genesis[start..end])
        });

        let clock = ThreadTime::now();
        let (_, record) = match &subset {
            None => comment(&dep.pk, &member.sk, &member.cred, &dom, m, &mut rng)?,
            Some(s) => comment_extended(&dep.params, &dep.pk, &member.sk, &member.cred, &dom, m, s, &mut rng)?,
        };
        let entry = CommentEntry {
            ciphertext: encrypt_for_ledger(&dep.billing_key, &record, &r),
            m_digest: record.m_digest,
            website: SITE_ID.to_owned(),
            dom,
            billing_period: dep.billing_key.period,
        };
        let dc = clock.elapsed().as_secs_f64();
        out.comment.push(dc);

        out.jobs.push(PreparedJob {
            event: index,
            t: ev.t,
            arrival: arrival + dc,
            period,
            kind: JobKind::Comment { entry, m: m.to_vec() },
        });
    }
    out.users = members.len();
    out.jobs
        .sort_by(|a, b| a.arrival.total_cmp(&b.arrival).then(a.event.cmp(&b.event)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_contains_own_entry() {
        for count in 1..20 {
            for own in 0..count {
                for k in 1..8 {
                    let (s, e) = genesis_window(own, count, k);
                    assert!(s <= own && own < e && e <= count);
                    assert_eq!(e - s, k.min(count));
                }
            }
        }
    }

    #[test]
    fn periods_are_whole_days() {
        let base = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
        assert_eq!(period_of(base, 0.0), base);
        assert_eq!(period_of(base, 86_399.9), base);
        assert_eq!(period_of(base, 86_400.0), NaiveDate::from_ymd_opt(2024, 1, 2).unwrap());
    }
}
