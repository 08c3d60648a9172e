//! Append-only journal of length-prefixed, checksummed records.
//!
//! Frame layout: `len: u32 BE || body || check: 8 bytes`, where `check` is the
//! first eight bytes of `h(tag, body)`. A frame that is cut off at the end of
//! the file, or whose checksum fails as the very last frame, is a torn write
//! and gets truncated on open. A bad frame followed by more data is corruption.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use tt_core::primitives::{hash, Digest};
use tt_core::wire::{Reader, Writer};

use crate::entry::EntryKind;
use crate::LedgerError;

const CHECK_TAG: &[u8] = b"tt-journal";
const CHECK_LEN: usize = 8;
const MAX_FRAME: usize = 64 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Record {
    Entry {
        index: u64,
        kind: EntryKind,
        timestamp: i64,
        payload: Vec<u8>,
        digest: Digest,
    },
    Nym {
        period: NaiveDate,
        nym: [u8; 32],
    },
    Purge {
        cutoff: NaiveDate,
    },
}

fn encode_date(d: NaiveDate) -> u32 {
    use chrono::Datelike;
    d.num_days_from_ce() as u32
}

fn decode_date(v: u32) -> Option<NaiveDate> {
    NaiveDate::from_num_days_from_ce_opt(v as i32)
}

impl Record {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::raw();
        match self {
            Record::Entry { index, kind, timestamp, payload, digest } => {
                w.u8(1)
                    .u64(*index)
                    .u8(kind.code())
                    .u64(*timestamp as u64)
                    .bytes(payload)
                    .bytes(digest.as_bytes());
            }
            Record::Nym { period, nym } => {
                w.u8(2).u32(encode_date(*period)).bytes(nym);
            }
            Record::Purge { cutoff } => {
                w.u8(3).u32(encode_date(*cutoff));
            }
        }
        w.finish()
    }

    fn decode(body: &[u8]) -> Option<Record> {
        let mut r = Reader::new(body);
        let rec = match r.u8().ok()? {
            1 => Record::Entry {
                index: r.u64().ok()?,
                kind: EntryKind::from_code(r.u8().ok()?)?,
                timestamp: r.u64().ok()? as i64,
                payload: r.bytes().ok()?.to_vec(),
                digest: Digest(r.array().ok()?),
            },
            2 => Record::Nym {
                period: decode_date(r.u32().ok()?)?,
                nym: r.array().ok()?,
            },
            3 => Record::Purge {
                cutoff: decode_date(r.u32().ok()?)?,
            },
            _ => return None,
        };
        r.finish().ok()?;
        Some(rec)
    }
}

fn checksum(body: &[u8]) -> [u8; CHECK_LEN] {
    let d = hash([CHECK_TAG, body]);
    d.0[..CHECK_LEN].try_into().expect("digest is longer than the checksum")
}

pub(crate) fn frame(rec: &Record) -> Vec<u8> {
    let body = rec.encode();
    let mut out = Vec::with_capacity(4 + body.len() + CHECK_LEN);
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(&body);
    out.extend_from_slice(&checksum(&body));
    out
}

/// Splits a journal image into records. Returns the records and the length of
/// the valid prefix.
pub(crate) fn parse(buf: &[u8]) -> Result<(Vec<Record>, usize), LedgerError> {
    let mut records = Vec::new();
    let mut pos = 0;
    while pos < buf.len() {
        let Some(len_bytes) = buf.get(pos..pos + 4) else { break };
        let len = u32::from_be_bytes(len_bytes.try_into().expect("four bytes")) as usize;
        if len > MAX_FRAME {
            return Err(corrupt(pos, "frame length out of range"));
        }
        let end = pos + 4 + len + CHECK_LEN;
        if end > buf.len() {
            break;
        }
        let body = &buf[pos + 4..pos + 4 + len];
        if checksum(body) != buf[pos + 4 + len..end] {
            if end == buf.len() {
                return Err(LedgerError::Torn { offset: pos as u64 });
            }
            return Err(corrupt(pos, "checksum mismatch"));
        }
        let rec = Record::decode(body).ok_or_else(|| corrupt(pos, "undecodable record"))?;
        records.push(rec);
        pos = end;
    }
    Ok((records, pos))
}

fn corrupt(offset: usize, reason: &str) -> LedgerError {
    LedgerError::Corrupt {
        offset: offset as u64,
        reason: reason.into(),
    }
}

pub(crate) struct Journal {
    file: File,
    path: PathBuf,
}

impl Journal {
    /// Opens or creates the journal, truncating a torn tail, and returns the
    /// records found.
    pub(crate) fn open(path: &Path) -> Result<(Journal, Vec<Record>), LedgerError> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)?;
        let mut buf = Vec::new();
        file.read_to_end(&mut buf)?;
        let (records, valid) = match parse(&buf) {
            Ok(ok) => ok,
            Err(LedgerError::Torn { offset }) => {
                let (records, _) = parse(&buf[..offset as usize])?;
                (records, offset as usize)
            }
            Err(e) => return Err(e),
        };
        if valid < buf.len() {
            tracing::warn!(
                path = %path.display(),
                dropped = buf.len() - valid,
                "truncating torn journal tail"
            );
            file.set_len(valid as u64)?;
            file.sync_all()?;
        }
        Ok((
            Journal {
                file,
                path: path.to_path_buf(),
            },
            records,
        ))
    }

    /// Writes one record and syncs it to disk.
    pub(crate) fn write(&mut self, rec: &Record) -> Result<(), LedgerError> {
        self.file.write_all(&frame(rec))?;
        self.file.sync_data()?;
        Ok(())
    }

    pub(crate) fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Record> {
        vec![
            Record::Entry {
                index: 0,
                kind: EntryKind::Comment,
                timestamp: -5,
                payload: vec![1, 2, 3],
                digest: Digest([7; 32]),
            },
            Record::Nym {
                period: NaiveDate::from_ymd_opt(2024, 2, 29).unwrap(),
                nym: [9; 32],
            },
            Record::Purge {
                cutoff: NaiveDate::from_ymd_opt(2023, 12, 31).unwrap(),
            },
        ]
    }

    #[test]
    fn frames_round_trip() {
        let buf: Vec<u8> = sample().iter().flat_map(frame).collect();
        let (records, valid) = parse(&buf).unwrap();
        assert_eq!(records, sample());
        assert_eq!(valid, buf.len());
    }

    #[test]
    fn every_cut_is_a_clean_prefix() {
        let frames: Vec<Vec<u8>> = sample().iter().map(frame).collect();
        let buf = frames.concat();
        for cut in 0..buf.len() {
            let (records, valid) = parse(&buf[..cut]).unwrap();
            let mut whole = 0;
            let mut n = 0;
            for f in &frames {
                if whole + f.len() > cut {
                    break;
                }
                whole += f.len();
                n += 1;
            }
            assert_eq!((records.len(), valid), (n, whole), "cut at {cut}");
        }
    }

    #[test]
    fn flipped_last_byte_is_torn_but_inner_flip_is_corrupt() {
        let buf: Vec<u8> = sample().iter().flat_map(frame).collect();
        let mut last = buf.clone();
        *last.last_mut().unwrap() ^= 1;
        assert!(matches!(parse(&last), Err(LedgerError::Torn { .. })));
        let mut inner = buf.clone();
        inner[6] ^= 1;
        assert!(matches!(parse(&inner), Err(LedgerError::Corrupt { offset: 0, .. })));
    }
}
