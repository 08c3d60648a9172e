use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasenameError {
    #[error("basename {0:?} is not of the form d:<YYYY-MM-DD>:<seq>")]
    Malformed(String),
}

/// Basename `(date, seq)`, canonically encoded as `d:<YYYY-MM-DD>:<seq>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basename {
    pub date: NaiveDate,
    pub seq: u32,
}

impl Basename {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_string().into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BasenameError> {
        let s = std::str::from_utf8(bytes)
            .map_err(|_| BasenameError::Malformed(String::from_utf8_lossy(bytes).into_owned()))?;
        s.parse()
    }
}

impl fmt::Display for Basename {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d:{}:{}", self.date.format("%Y-%m-%d"), self.seq)
    }
}

impl FromStr for Basename {
    type Err = BasenameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || BasenameError::Malformed(s.to_owned());
        let rest = s.strip_prefix("d:").ok_or_else(malformed)?;
        let (date, seq) = rest.rsplit_once(':').ok_or_else(malformed)?;
        let date = NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|_| malformed())?;
        let seq: u32 = seq.parse().map_err(|_| malformed())?;
        let dom = Basename { date, seq };
        // Reject alternative spellings ("d:2024-1-1:01") so each basename has one encoding.
        if dom.to_string() != s {
            return Err(malformed());
        }
        Ok(dom)
    }
}

pub fn make_basename(date: NaiveDate, seq: u32) -> Basename {
    Basename { date, seq }
}

pub fn validate_basename(dom: &Basename, today: NaiveDate, tau: u32) -> bool {
    dom.date == today && (1..=tau).contains(&dom.seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn day(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn validation_window() {
        let today = day(2024, 3, 5);
        assert!(validate_basename(&make_basename(today, 1), today, 20));
        assert!(validate_basename(&make_basename(today, 20), today, 20));
        assert!(!validate_basename(&make_basename(today, 21), today, 20));
        assert!(!validate_basename(&make_basename(today, 0), today, 20));
        assert!(!validate_basename(&make_basename(day(2024, 3, 4), 1), today, 20));
    }

    #[test]
    fn canonical_encoding() {
        let dom = make_basename(day(2020, 1, 1), 1);
        assert_eq!(dom.to_string(), "d:2020-01-01:1");
        assert_eq!("d:2020-01-01:1".parse::<Basename>().unwrap(), dom);
        for bad in ["d:2020-1-1:1", "d:2020-01-01:01", "x:2020-01-01:1", "d:2020-01-01:", "d:2020-02-30:1", "d:2020-01-01:+1"] {
            assert!(bad.parse::<Basename>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn encoding_round_trips(days in 0i64..100_000, seq in 0u32..10_000) {
            let date = day(1970, 1, 1) + chrono::Duration::days(days);
            let dom = make_basename(date, seq);
            prop_assert_eq!(Basename::from_bytes(&dom.to_bytes()).unwrap(), dom);
        }
    }
}
