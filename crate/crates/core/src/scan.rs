//! Deterministic parallel scans over prime windows.
//!
//! Work is split across a rayon pool of the requested size, but every result
//! is assembled in ascending prime order, so reports do not depend on the
//! worker count.

use rayon::prelude::*;

use crate::error::Result;
use crate::numth::PrimeRange;
use crate::report::{ConditionId, ConditionReport, Verdict, Witness};

/// Primes handed to the pool per batch in early-terminating collections.
const BATCH: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub workers: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { workers: 1 }
    }
}

impl ScanOptions {
    pub fn with_workers(workers: usize) -> Self {
        ScanOptions {
            workers: workers.max(1),
        }
    }

    fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.workers <= 1 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

/// Runs `test` at every good prime of `scan`; the first failing prime (in
/// ascending order) becomes the witness.
///
/// `test` returns `Some((n, detail))` on violation.
pub fn scan_primes<G, T>(
    id: ConditionId,
    scan: PrimeRange,
    opts: &ScanOptions,
    is_good: G,
    test: T,
) -> Result<ConditionReport>
where
    G: Fn(u64) -> bool + Sync,
    T: Fn(u64) -> Result<Option<(u64, String)>> + Sync,
{
    let primes = scan.primes();
    let probe = |v: u64| -> Option<Result<(u64, u64, String)>> {
        if !is_good(v) {
            return None;
        }
        match test(v) {
            Ok(None) => None,
            Ok(Some((n, detail))) => Some(Ok((v, n, detail))),
            Err(e) => Some(Err(e)),
        }
    };
    let first = if opts.workers <= 1 {
        primes.iter().find_map(|&v| probe(v))
    } else {
        opts.install(|| primes.par_iter().find_map_first(|&v| probe(v)))
    };
    let witness = first
        .transpose()?
        .map(|(v, n, detail)| Witness { v, n, detail });
    let limit = witness.as_ref().map_or(scan.hi(), |w| w.v);
    let skipped_primes = primes
        .iter()
        .copied()
        .take_while(|&v| v <= limit)
        .filter(|&v| !is_good(v))
        .collect();
    Ok(ConditionReport {
        condition_id: id,
        verdict: if witness.is_some() {
            Verdict::Violated
        } else {
            Verdict::HoldsOnScan
        },
        witness,
        scanned: scan,
        skipped_primes,
    })
}

/// Applies `f` to every prime of `primes`, keeping `Some` results in
/// ascending order, and stops after `limit` results.
pub fn collect_ordered<T, F>(
    primes: &[u64],
    opts: &ScanOptions,
    limit: usize,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<Option<T>> + Sync,
{
    let mut out = Vec::new();
    if limit == 0 {
        return Ok(out);
    }
    if opts.workers <= 1 {
        for &v in primes {
            if let Some(t) = f(v)? {
                out.push(t);
                if out.len() >= limit {
                    break;
                }
            }
        }
        return Ok(out);
    }
    opts.install(|| {
        for chunk in primes.chunks(BATCH) {
            let results: Vec<Option<T>> = chunk
                .par_iter()
                .map(|&v| f(v))
                .collect::<Result<Vec<_>>>()?;
            for t in results.into_iter().flatten() {
                out.push(t);
                if out.len() >= limit {
                    return Ok(out);
                }
            }
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_witness_is_smallest_prime_for_any_worker_count() {
        let scan = PrimeRange::new(3, 5000).unwrap();
        let run = |w| {
            scan_primes(
                ConditionId::Detect,
                scan,
                &ScanOptions::with_workers(w),
                |v| v != 5,
                |v| Ok((v % 97 == 1).then(|| (v, format!("hit {v}")))),
            )
            .unwrap()
        };
        let a = run(1);
        assert_eq!(a.witness.as_ref().unwrap().v, 389);
        assert_eq!(a.skipped_primes, vec![5]);
        for w in [2, 4, 8] {
            assert_eq!(run(w), a);
        }
    }

    #[test]
    fn collect_is_ordered_and_truncated() {
        let primes = PrimeRange::new(2, 100_000).unwrap().primes();
        let f = |v: u64| Ok((v % 10 == 7).then_some(v));
        let seq = collect_ordered(&primes, &ScanOptions::default(), 50, f).unwrap();
        let par = collect_ordered(&primes, &ScanOptions::with_workers(6), 50, f).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 50);
        assert!(seq.windows(2).all(|w| w[0] < w[1]));
    }
}
