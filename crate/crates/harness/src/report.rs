use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

/// Count, mean, median and population variance of a sample, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub variance: f64,
}

impl Stats {
    pub fn of(samples: &[f64]) -> Stats {
        if samples.is_empty() {
            return Stats::default();
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let variance = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 0 {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        } else {
            sorted[mid]
        };
        Stats {
            count: samples.len(),
            mean,
            median,
            variance,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcomes {
    pub published: usize,
    pub duplicate: usize,
    pub over_threshold: usize,
    pub invalid: usize,
}

impl Outcomes {
    pub fn total(&self) -> usize {
        self.published + self.duplicate + self.over_threshold + self.invalid
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: String,
    pub tau: u32,
    pub events: usize,
    pub users: usize,
    pub outcomes: Outcomes,
    pub cores: usize,
    pub latency_target: f64,
    pub issue_user: Stats,
    pub issue_issuer: Stats,
    pub comment: Stats,
    pub verify: Stats,
    /// Server-side latency: finish time minus arrival time.
    pub latency: Stats,
    pub max_latency: f64,
    pub fraction_under_target: f64,
    pub genesis_tuples: usize,
    /// Sum of the serialized entries this run appended.
    pub ledger_bytes: u64,
    /// The same quantity as reported by the ledger's own counter.
    pub ledger_bytes_counter: u64,
    pub mean_entry_bytes: f64,
    /// From the first event to the last finish.
    pub running_seconds: f64,
}

/// Price of compute.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub dollars_per_core_hour: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            dollars_per_core_hour: 0.05,
        }
    }
}

/// A dollar amount held in whole cents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dollars {
    pub cents: u64,
}

impl fmt::Display for Dollars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}.{:02}", self.cents / 100, self.cents % 100)
    }
}

impl CostModel {
    pub fn cost(&self, cores: usize, running_seconds: f64) -> Dollars {
        let dollars = cores as f64 * running_seconds.max(0.0) / 3600.0 * self.dollars_per_core_hour.max(0.0);
        Dollars {
            cents: (dollars * 100.0).round() as u64,
        }
    }
}

/// Cores times running hours times the hourly rate, rounded to cents.
pub fn cost_report(report: &SimReport, model: &CostModel) -> Dollars {
    model.cost(report.cores, report.running_seconds)
}

impl SimReport {
    /// Aligned text rendering: per-measure timings, then the run summary.
    pub fn to_table(&self, model: &CostModel) -> String {
        let mut out = String::new();
        let rows = [
            ("issuing (user)", &self.issue_user),
            ("issuing (issuer)", &self.issue_issuer),
            ("commenting", &self.comment),
            ("verification", &self.verify),
            ("latency", &self.latency),
        ];
        let _ = writeln!(out, "{:<18} {:>8} {:>10} {:>10} {:>12}", "measure", "n", "mean", "median", "variance");
        for (name, s) in rows {
            let _ = writeln!(
                out,
                "{:<18} {:>8} {:>10.4} {:>10.4} {:>12.6}",
                name, s.count, s.mean, s.median, s.variance
            );
        }
        let o = &self.outcomes;
        let _ = writeln!(out);
        let summary = [
            ("mode", self.mode.clone()),
            ("events", self.events.to_string()),
            ("published", o.published.to_string()),
            ("duplicate nym", o.duplicate.to_string()),
            ("over threshold", o.over_threshold.to_string()),
            ("invalid", o.invalid.to_string()),
            ("cores", self.cores.to_string()),
            ("cost", cost_report(self, model).to_string()),
            ("max latency", format!("{:.3}s", self.max_latency)),
            (
                "latency target",
                format!("{:.2}% < {}s", 100.0 * self.fraction_under_target, self.latency_target),
            ),
            ("genesis tuples", self.genesis_tuples.to_string()),
            ("ledger size", format!("{:.3} MB", self.ledger_bytes as f64 / 1e6)),
            ("mean entry", format!("{:.0} B", self.mean_entry_bytes)),
        ];
        for (k, v) in summary {
            let _ = writeln!(out, "{k:<18} {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_small_samples() {
        assert_eq!(Stats::of(&[]), Stats::default());
        let s = Stats::of(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!((s.count, s.mean, s.median, s.variance), (4, 2.5, 2.5, 1.25));
        assert_eq!(Stats::of(&[5.0, 1.0, 3.0]).median, 3.0);
    }

    #[test]
    fn costs_in_cents() {
        let model = CostModel::default();
        assert_eq!(model.cost(3, 24.0 * 3600.0).to_string(), "$3.60");
        assert_eq!(model.cost(1, 24.0 * 3600.0).to_string(), "$1.20");
        assert_eq!(model.cost(4, 0.0).cents, 0);
    }
}
