use std::collections::{BTreeMap, HashMap};

use chrono::NaiveDate;
use tt_core::wire::Writer;

type Counts = HashMap<[u8; 32], u64>;

/// Pseudonym occurrence counts, partitioned by commenting period.
///
/// Only the newest period touched is "current"; moving to a later period
/// archives the previous counts. Registrations for an archived period still
/// land in that period's map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NymIndex {
    current: Option<NaiveDate>,
    counts: Counts,
    archive: BTreeMap<NaiveDate, Counts>,
}

impl NymIndex {
    pub fn current_period(&self) -> Option<NaiveDate> {
        self.current
    }

    fn counts_mut(&mut self, period: NaiveDate) -> &mut Counts {
        match self.current {
            Some(cur) if period < cur => self.archive.entry(period).or_default(),
            Some(cur) if period == cur => &mut self.counts,
            Some(cur) => {
                let old = std::mem::take(&mut self.counts);
                if !old.is_empty() {
                    self.archive.insert(cur, old);
                }
                self.current = Some(period);
                &mut self.counts
            }
            None => {
                self.current = Some(period);
                &mut self.counts
            }
        }
    }

    /// Increments the count and reports whether it was zero before.
    pub fn register(&mut self, period: NaiveDate, nym: [u8; 32]) -> bool {
        let c = self.counts_mut(period).entry(nym).or_insert(0);
        *c += 1;
        *c == 1
    }

    pub fn count(&self, nym: &[u8; 32]) -> u64 {
        self.counts.get(nym).copied().unwrap_or(0)
    }

    pub fn count_in(&self, period: NaiveDate, nym: &[u8; 32]) -> u64 {
        let map = if Some(period) == self.current {
            Some(&self.counts)
        } else {
            self.archive.get(&period)
        };
        map.and_then(|m| m.get(nym)).copied().unwrap_or(0)
    }

    pub fn periods(&self) -> usize {
        self.archive.len() + usize::from(self.current.is_some())
    }

    /// Drops archived periods before `cutoff`.
    pub fn purge_before(&mut self, cutoff: NaiveDate) {
        self.archive = self.archive.split_off(&cutoff);
    }

    pub(crate) fn encode(&self, w: &mut Writer) {
        fn counts(w: &mut Writer, c: &Counts) {
            let mut sorted: Vec<_> = c.iter().collect();
            sorted.sort();
            w.u64(sorted.len() as u64);
            for (nym, n) in sorted {
                w.bytes(nym).u64(*n);
            }
        }
        match self.current {
            Some(d) => w.u8(1).bytes(d.to_string().as_bytes()),
            None => w.u8(0),
        };
        counts(w, &self.counts);
        w.u64(self.archive.len() as u64);
        for (d, c) in &self.archive {
            w.bytes(d.to_string().as_bytes());
            counts(w, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 3, d).unwrap()
    }

    #[test]
    fn lazy_rollover_and_late_arrivals() {
        let mut idx = NymIndex::default();
        assert!(idx.register(day(1), [1; 32]));
        assert!(!idx.register(day(1), [1; 32]));
        assert_eq!(idx.count(&[1; 32]), 2);
        assert!(idx.register(day(2), [1; 32]));
        assert_eq!(idx.count(&[1; 32]), 1);
        assert_eq!(idx.count_in(day(1), &[1; 32]), 2);
        assert!(!idx.register(day(1), [1; 32]));
        assert_eq!(idx.count_in(day(1), &[1; 32]), 3);
        assert_eq!(idx.current_period(), Some(day(2)));
        idx.purge_before(day(2));
        assert_eq!(idx.count_in(day(1), &[1; 32]), 0);
        assert_eq!(idx.periods(), 1);
    }
}
