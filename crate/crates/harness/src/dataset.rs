use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Nickname the source data uses for removed accounts.
pub const DELETED_USER: &str = "[deleted]";
/// All deleted accounts are replayed as this one user.
pub const SYNTHETIC_DELETED: &str = "__deleted__";

/// One dataset row: at `t` seconds, user `u` posts `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficEvent {
    pub t: f64,
    pub u: String,
    pub m: String,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// Picks the format from the extension, falling back to the first
    /// non-blank character (`{` means JSONL).
    pub fn detect(path: &Path, text: &str) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => Format::Jsonl,
            Some("csv") => Format::Csv,
            _ if text.trim_start().starts_with('{') => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<TrafficEvent>, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_dataset(&text, Format::detect(path, &text))
}

/// Parses, validates, maps deleted accounts and sorts by time. Rows with
/// equal `t` keep their dataset order.
pub fn parse_dataset(text: &str, format: Format) -> Result<Vec<TrafficEvent>, DatasetError> {
    let rows = match format {
        Format::Jsonl => parse_jsonl(text)?,
        Format::Csv => parse_csv(text)?,
    };
    let mut events = Vec::with_capacity(rows.len());
    for (line, mut ev) in rows {
        if !ev.t.is_finite() || ev.t < 0.0 {
            return Err(DatasetError::Parse {
                line,
                message: format!("time {} is not a finite non-negative number", ev.t),
            });
        }
        if ev.u == DELETED_USER {
            ev.u = SYNTHETIC_DELETED.to_owned();
        }
        events.push(ev);
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(events)
}

fn parse_jsonl(text: &str) -> Result<Vec<(usize, TrafficEvent)>, DatasetError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ev = serde_json::from_str(line).map_err(|e| DatasetError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        rows.push((i + 1, ev));
    }
    Ok(rows)
}

fn parse_csv(text: &str) -> Result<Vec<(usize, TrafficEvent)>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DatasetError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(DatasetError::Parse {
                line,
                message: format!("expected 3 fields (t,u,m), found {}", record.len()),
            });
        }
        if n == 0 && record[0].trim() == "t" {
            continue;
        }
        let t = record[0].trim().parse::<f64>().map_err(|e| DatasetError::Parse {
            line,
            message: format!("bad time {:?}: {e}", &record[0]),
        })?;
        rows.push((
            line,
            TrafficEvent {
                t,
                u: record[1].to_owned(),
                m: record[2].to_owned(),
            },
        ));
    }
    Ok(rows)
}

pub fn write_jsonl(events: &[TrafficEvent], mut out: impl Write) -> io::Result<()> {
    for ev in events {
        serde_json::to_writer(&mut out, ev)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

const WORDS: &[&str] = &[
    "the", "vote", "city", "report", "council", "budget", "really", "agree", "source", "data",
    "why", "people", "article", "think", "policy", "great", "never", "local", "news", "school",
];

/// A day of traffic: uniform arrival times, heavy-tailed user activity and
/// about one percent of rows from deleted accounts.
pub fn gen_synthetic(users: usize, comments: usize, seed: u64) -> Vec<TrafficEvent> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let users = users.max(1);
    let weights: Vec<f64> = (0..users).map(|r| 1.0 / ((r + 1) as f64).powf(0.8)).collect();
    let pick = WeightedIndex::new(&weights).expect("positive weights");
    let mut events: Vec<TrafficEvent> = (0..comments)
        .map(|_| {
            let u = if rng.gen_bool(0.01) {
                DELETED_USER.to_owned()
            } else {
                format!("user{:05}", pick.sample(&mut rng))
            };
            let len = rng.gen_range(3..40);
            let m = (0..len)
                .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
                .collect::<Vec<_>>()
                .join(" ");
            TrafficEvent {
                t: rng.gen_range(0.0..86_400.0),
                u,
                m,
            }
        })
        .collect();
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    events
}
