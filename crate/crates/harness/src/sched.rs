/// First-come-first-serve over `cores` identical workers. Jobs must be in
/// dispatch order; each starts on the worker that frees up first, but not
/// before it arrives. Returns the finish times.
pub fn fcfs(arrivals: &[f64], service: &[f64], cores: usize) -> Vec<f64> {
    assert_eq!(arrivals.len(), service.len());
    let mut free = vec![f64::NEG_INFINITY; cores.max(1)];
    arrivals
        .iter()
        .zip(service)
        .map(|(&a, &s)| {
            let (k, &t) = free
                .iter()
                .enumerate()
                .min_by(|x, y| x.1.total_cmp(y.1))
                .expect("at least one worker");
            let finish = a.max(t) + s;
            free[k] = finish;
            finish
        })
        .collect()
}

/// Smallest worker count for which no job with constant service time
/// `service` finishes later than `arrival + target`. Starts at one core and
/// adds one while some job misses. If even one worker per job misses
/// (`service > target`), returns the job count, beyond which more cores
/// change nothing.
pub fn estimate_cores(arrivals: &[f64], service: f64, target: f64) -> usize {
    let service_times = vec![service; arrivals.len()];
    let max = arrivals.len().max(1);
    if service > target {
        return max;
    }
    (1..=max)
        .find(|&cores| {
            fcfs(arrivals, &service_times, cores)
                .iter()
                .zip(arrivals)
                .all(|(f, a)| *f <= a + target)
        })
        .unwrap_or(max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_worker_queues() {
        assert_eq!(fcfs(&[0.0, 0.0, 5.0], &[1.0, 1.0, 1.0], 1), vec![1.0, 2.0, 6.0]);
        assert_eq!(fcfs(&[0.0, 0.0, 0.5], &[1.0, 1.0, 1.0], 2), vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn single_event_needs_one_core() {
        assert_eq!(estimate_cores(&[3.0], 0.02, 0.1), 1);
        assert_eq!(estimate_cores(&[], 0.02, 0.1), 1);
    }
}
