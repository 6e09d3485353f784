//! Batched latency measurement.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

pub const BATCH: usize = 10_000;

/// Per-query latency in nanoseconds, amortized over batches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Latency {
    pub batches: usize,
    pub p50_ns: f64,
    pub p99_ns: f64,
    pub mean_ns: f64,
}

/// Times `f` over `queries` in batches of `batch`, after one untimed warmup
/// pass over the first batch. At least `min_batches` batches are timed,
/// cycling through the queries.
pub fn measure_latency<Q, F>(queries: &[Q], batch: usize, min_batches: usize, mut f: F) -> Latency
where
    F: FnMut(&Q) -> bool,
{
    if queries.is_empty() || batch == 0 {
        return Latency::default();
    }
    for q in queries.iter().take(batch) {
        black_box(f(black_box(q)));
    }
    let batches = queries.len().div_ceil(batch).max(min_batches);
    let mut samples = Vec::with_capacity(batches);
    let mut next = 0;
    for _ in 0..batches {
        let start = Instant::now();
        for _ in 0..batch {
            black_box(f(black_box(&queries[next])));
            next = (next + 1) % queries.len();
        }
        samples.push(start.elapsed().as_nanos() as f64 / batch as f64);
    }
    let mean_ns = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.sort_by(f64::total_cmp);
    Latency {
        batches,
        p50_ns: percentile(&samples, 0.50),
        p99_ns: percentile(&samples, 0.99),
        mean_ns,
    }
}

/// Nearest-rank percentile of sorted samples.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
