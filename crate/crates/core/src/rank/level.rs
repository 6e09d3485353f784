//! The second-level bin directory: `m` sorted values spread over `m^alpha`
//! equal bins, escalating `alpha` until no bin holds five or more values.

use serde::Serialize;

use super::Interval;
use crate::error::{invalid, Result};

/// A bin holding more than this many values needs a second level.
pub const MAX_DIRECT: usize = 4;

/// Bin directories never grow past `LEVEL_CAP_FACTOR * m²` bins; past that the
/// values are binary searched instead.
pub const LEVEL_CAP_FACTOR: usize = 16;

/// Bin index of `x` for `bins` equal bins over `[lo, hi]`; the right endpoint
/// folds into the last bin. Requires `hi > lo`.
///
/// Build and query both go through this function, and every floating point
/// step in it is monotone in `x`, so bin order always agrees with value order.
#[inline]
pub(crate) fn bin_of(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let t = (x - lo) / (hi - lo) * bins as f64;
    // `as` saturates: negatives and NaN land in bin 0
    (t as usize).min(bins - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LevelShape {
    pub alpha: u32,
    /// 0 means fallback: the values are binary searched.
    pub bins: usize,
}

impl LevelShape {
    pub fn is_fallback(&self) -> bool {
        self.bins == 0
    }
}

fn has_five_in_a_bin(sorted: &[f64], lo: f64, hi: f64, bins: usize) -> bool {
    sorted
        .windows(MAX_DIRECT + 1)
        .any(|w| bin_of(w[0], lo, hi, bins) == bin_of(w[MAX_DIRECT], lo, hi, bins))
}

/// Picks the smallest `alpha` whose `m^alpha` bins hold at most four values
/// each and appends the `bins + 1` exclusive prefix counts to `starts`.
///
/// `sorted` must be ascending and inside `[lo, hi]`.
pub(crate) fn build_level(sorted: &[f64], lo: f64, hi: f64, starts: &mut Vec<u32>) -> LevelShape {
    let m = sorted.len();
    debug_assert!(m >= 1);
    // identical values, or a zero-width interval, can never be separated
    let stuck = !(hi > lo) || sorted.windows(MAX_DIRECT + 1).any(|w| w[0] == w[MAX_DIRECT]);
    if stuck {
        return LevelShape { alpha: 0, bins: 0 };
    }
    let cap = LEVEL_CAP_FACTOR * m * m;
    let mut alpha = 1u32;
    let mut bins = m;
    loop {
        if !has_five_in_a_bin(sorted, lo, hi, bins) {
            break;
        }
        match bins.checked_mul(m) {
            Some(next) if next <= cap => {
                bins = next;
                alpha += 1;
            }
            _ => return LevelShape { alpha, bins: 0 },
        }
    }
    let base = starts.len();
    starts.reserve(bins + 1);
    let mut idx = 0;
    for b in 0..=bins {
        while idx < m && bin_of(sorted[idx], lo, hi, bins) < b {
            idx += 1;
        }
        starts.push(idx as u32);
    }
    debug_assert_eq!(starts[base + bins] as usize, m);
    LevelShape { alpha, bins }
}

/// Number of values in `sorted` that are `<= x`.
#[inline]
pub(crate) fn level_rank(sorted: &[f64], starts: &[u32], lo: f64, hi: f64, bins: usize, x: f64) -> usize {
    if !(x >= lo) {
        return 0;
    }
    if x >= hi {
        return sorted.len();
    }
    if bins == 0 {
        return sorted.partition_point(|&v| v <= x);
    }
    let b = bin_of(x, lo, hi, bins);
    let s = starts[b] as usize;
    let e = starts[b + 1] as usize;
    s + sorted[s..e].iter().take_while(|&&v| v <= x).count()
}

/// Standalone second-level structure over `m` values.
#[derive(Debug, Clone)]
pub struct BinLevel {
    interval: Interval,
    shape: LevelShape,
    starts: Vec<u32>,
    values: Vec<f64>,
}

/// Shape summary of a [`BinLevel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub alpha: u32,
    pub bin_count: usize,
    pub fallback: bool,
}

impl BinLevel {
    pub fn build(values: &[f64], interval: Interval) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("a bin level needs at least one value"));
        }
        interval.check_all(values)?;
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let mut starts = Vec::new();
        let shape = build_level(&sorted, interval.lo, interval.hi, &mut starts);
        Ok(Self {
            interval,
            shape,
            starts,
            values: sorted,
        })
    }

    pub fn rank(&self, x: f64) -> usize {
        level_rank(
            &self.values,
            &self.starts,
            self.interval.lo,
            self.interval.hi,
            self.shape.bins,
            x,
        )
    }

    pub fn stats(&self) -> LevelStats {
        LevelStats {
            alpha: self.shape.alpha,
            bin_count: self.shape.bins,
            fallback: self.shape.is_fallback(),
        }
    }

    pub fn alpha(&self) -> u32 {
        self.shape.alpha
    }

    pub fn bin_count(&self) -> usize {
        self.shape.bins
    }

    pub fn is_fallback(&self) -> bool {
        self.shape.is_fallback()
    }

    /// Values stored in bins `0..=b`.
    pub fn prefix(&self, b: usize) -> usize {
        self.starts[b + 1] as usize
    }

    pub fn max_occupancy(&self) -> usize {
        if self.is_fallback() {
            return self.values.len();
        }
        self.starts
            .windows(2)
            .map(|w| (w[1] - w[0]) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sample_values;
    use crate::oracle::oracle_rank;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn four_values_take_alpha_one() {
        let lvl = BinLevel::build(&[0.1, 0.4, 0.7, 0.9], unit()).unwrap();
        assert_eq!(lvl.alpha(), 1);
        assert_eq!(lvl.bin_count(), 4);
        assert!(lvl.max_occupancy() <= MAX_DIRECT);
        assert_eq!(lvl.prefix(3), 4);
    }

    #[test]
    fn small_ranks() {
        let lvl = BinLevel::build(&[0.25, 0.5, 0.75], unit()).unwrap();
        assert_eq!(lvl.rank(0.6), 2);
        assert_eq!(lvl.rank(0.0), 0);
        assert_eq!(lvl.rank(0.25), 1);
        assert_eq!(lvl.rank(1.0), 3);
    }

    #[test]
    fn clustered_values_fall_back_and_stay_exact() {
        let vals: Vec<f64> = (0..6).map(|i| i as f64 * 1e-10).collect();
        let lvl = BinLevel::build(&vals, unit()).unwrap();
        assert!(lvl.is_fallback());
        let mut probes: Vec<f64> = vals.clone();
        probes.extend(vals.iter().map(|v| v + 5e-11));
        probes.extend([0.0, -1.0, 1e-9, 0.5, 1.0, 2.0]);
        for x in probes {
            assert_eq!(lvl.rank(x), oracle_rank(&vals, x), "x = {x}");
        }
    }

    #[test]
    fn duplicates_fall_back_immediately() {
        let lvl = BinLevel::build(&[0.3; 7], unit()).unwrap();
        assert!(lvl.is_fallback());
        assert_eq!(lvl.rank(0.3), 7);
        assert_eq!(lvl.rank(0.2999), 0);
    }

    #[test]
    fn random_level_matches_oracle() {
        let vals = sample_values(200, 17);
        let lvl = BinLevel::build(&vals, unit()).unwrap();
        assert!(lvl.max_occupancy() <= MAX_DIRECT || lvl.is_fallback());
        for x in sample_values(10_000, 18) {
            assert_eq!(lvl.rank(x), oracle_rank(&vals, x));
        }
    }

    #[test]
    fn thirty_two_values_rarely_need_alpha_three() {
        let mut at_most_two = 0;
        for seed in 0..1000 {
            let lvl = BinLevel::build(&sample_values(32, seed), unit()).unwrap();
            if lvl.alpha() <= 2 && !lvl.is_fallback() {
                at_most_two += 1;
            }
        }
        assert!(at_most_two >= 950, "{at_most_two}");
    }

    #[test]
    fn rejects_out_of_interval() {
        assert!(BinLevel::build(&[0.5, 1.5], unit()).is_err());
        assert!(BinLevel::build(&[], unit()).is_err());
    }
}
