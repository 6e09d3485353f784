//! Constant-time rank queries for reals drawn uniformly from an interval.
//!
//! The top level spreads `n` values over `n` equal bins. Bins with at most
//! four values are scanned directly; each bin with five or more gets its own
//! [`BinLevel`] with `m^alpha` bins. Answers are exact for any input, the
//! random-input assumption only matters for space and time.

mod arena;
mod level;

use serde::Serialize;

pub(crate) use arena::{DirRef, RankArena};
pub use level::{BinLevel, LevelStats, LEVEL_CAP_FACTOR, MAX_DIRECT};

use crate::error::{invalid, Result};
use crate::geom::{RankRect, SemiOpenRect, UnitPoint};

/// Closed interval `[lo, hi]` the values of a rank structure are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub(crate) fn check_all(&self, values: &[f64]) -> Result<()> {
        match values.iter().find(|&&v| !self.contains(v)) {
            Some(v) => Err(invalid(format!("value {v} outside [{}, {}]", self.lo, self.hi))),
            None => Ok(()),
        }
    }
}

/// Space accounting of a rank structure, in slots (one slot per stored
/// prefix count or value).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RankSpace {
    pub values: usize,
    /// `n + 1` prefix counts plus `n` stored values.
    pub top_slots: usize,
    /// Prefix counts of all second-level directories.
    pub level_slots: usize,
    pub total_slots: usize,
    pub overflow_bins: usize,
    pub fallback_bins: usize,
    pub max_alpha: u32,
}

/// Two-level rank structure over `n` reals.
#[derive(Debug, Clone)]
pub struct Rank1D {
    interval: Interval,
    dir: DirRef,
    arena: RankArena,
}

impl Rank1D {
    pub fn build(values: &[f64], interval: Interval) -> Result<Self> {
        interval.check_all(values)?;
        let mut arena = RankArena::new();
        let dir = arena.push(values.iter().copied(), interval.lo, interval.hi);
        arena.finish();
        Ok(Self { interval, dir, arena })
    }

    /// `|{v : v <= x}|`.
    #[inline]
    pub fn rank(&self, x: f64) -> usize {
        self.arena.rank(self.dir, self.interval.lo, self.interval.hi, x)
    }

    /// Largest stored value `<= x`.
    pub fn predecessor(&self, x: f64) -> Option<f64> {
        match self.rank(x) {
            0 => None,
            r => Some(self.sorted_values()[r - 1]),
        }
    }

    pub fn len(&self) -> usize {
        self.dir.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.dir.len == 0
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// The stored values read back bin by bin.
    pub fn sorted_values(&self) -> &[f64] {
        self.arena.values(self.dir)
    }

    /// Top-level bins that own a second-level directory.
    pub fn overflow_bins(&self) -> Vec<usize> {
        self.arena.overflow_bins(self.dir)
    }

    /// Number of values in top-level bin `b`.
    pub fn occupancy(&self, b: usize) -> usize {
        self.arena.occupancy(self.dir, b)
    }

    pub fn space(&self) -> RankSpace {
        let s = self.arena.space(self.dir);
        RankSpace {
            values: self.len(),
            top_slots: s.top_slots,
            level_slots: s.level_slots,
            total_slots: s.top_slots + s.level_slots,
            overflow_bins: s.overflow_bins,
            fallback_bins: s.fallback_bins,
            max_alpha: s.max_alpha,
        }
    }

    pub fn heap_bytes(&self) -> usize {
        self.arena.heap_bytes()
    }
}

/// Coordinatewise rank structure for points in `d` dimensions.
#[derive(Debug, Clone)]
pub struct MultiRank {
    domain: Vec<Interval>,
    dirs: Vec<DirRef>,
    arena: RankArena,
}

impl MultiRank {
    /// Builds one rank directory per coordinate slice.
    pub fn build<P: AsRef<[f64]>>(points: &[P], domain: &[Interval]) -> Result<Self> {
        let d = domain.len();
        if d == 0 {
            return Err(invalid("need at least one dimension"));
        }
        for (idx, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != d {
                return Err(invalid(format!(
                    "point {idx} has {} coordinates, expected {d}",
                    p.len()
                )));
            }
            for (k, (&v, iv)) in p.iter().zip(domain).enumerate() {
                if !iv.contains(v) {
                    return Err(invalid(format!("point {idx} coordinate {k} = {v} outside domain")));
                }
            }
        }
        let mut arena = RankArena::new();
        let dirs = (0..d)
            .map(|k| {
                let slice = points.iter().map(|p| p.as_ref()[k]);
                arena.push(slice, domain[k].lo, domain[k].hi)
            })
            .collect();
        arena.finish();
        Ok(Self {
            domain: domain.to_vec(),
            dirs,
            arena,
        })
    }

    /// Two-dimensional build over `domain = [x-interval, y-interval]`.
    pub fn build_2d(points: &[UnitPoint], domain: [Interval; 2]) -> Result<Self> {
        let tuples: Vec<[f64; 2]> = points.iter().map(|p| [p.x, p.y]).collect();
        Self::build(&tuples, &domain)
    }

    pub fn dims(&self) -> usize {
        self.dirs.len()
    }

    pub fn len(&self) -> usize {
        self.dirs[0].len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn rank_in(&self, dim: usize, x: f64) -> usize {
        let iv = self.domain[dim];
        self.arena.rank(self.dirs[dim], iv.lo, iv.hi, x)
    }

    /// Rank of every coordinate of `q`.
    pub fn query(&self, q: &[f64]) -> Result<Vec<usize>> {
        if q.len() != self.dims() {
            return Err(invalid(format!(
                "query has {} coordinates, expected {}",
                q.len(),
                self.dims()
            )));
        }
        Ok(q.iter().enumerate().map(|(k, &v)| self.rank_in(k, v)).collect())
    }

    #[inline]
    pub fn query2(&self, x: f64, y: f64) -> (usize, usize) {
        (self.rank_in(0, x), self.rank_in(1, y))
    }

    /// Rank translation of a rectangle: its corners mapped to rank space.
    #[inline]
    pub fn translate(&self, r: &SemiOpenRect) -> RankRect {
        let (i1, j1) = self.query2(r.x_lo, r.y_lo);
        let (i2, j2) = self.query2(r.x_hi, r.y_hi);
        RankRect { i1, i2, j1, j2 }
    }

    /// Checked form of [`MultiRank::translate`]; requires two dimensions.
    pub fn rank_translate_rect(&self, r: &SemiOpenRect) -> Result<RankRect> {
        if self.dims() != 2 {
            return Err(invalid("rank translation of rectangles needs a 2-d structure"));
        }
        Ok(self.translate(r))
    }

    pub fn sorted_values(&self, dim: usize) -> &[f64] {
        self.arena.values(self.dirs[dim])
    }

    pub fn space(&self) -> RankSpace {
        let mut total = RankSpace::default();
        for &d in &self.dirs {
            let s = self.arena.space(d);
            total.values += d.len as usize;
            total.top_slots += s.top_slots;
            total.level_slots += s.level_slots;
            total.overflow_bins += s.overflow_bins;
            total.fallback_bins += s.fallback_bins;
            total.max_alpha = total.max_alpha.max(s.max_alpha);
        }
        total.total_slots = total.top_slots + total.level_slots;
        total
    }

    pub fn heap_bytes(&self) -> usize {
        self.arena.heap_bytes() + self.dirs.capacity() * std::mem::size_of::<DirRef>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{sample_points, sample_values};
    use crate::oracle::oracle_rank;
    use proptest::prelude::*;

    #[test]
    fn single_value() {
        let r = Rank1D::build(&[0.5], Interval::UNIT).unwrap();
        assert_eq!(r.rank(0.5), 1);
        assert_eq!(r.rank(0.49), 0);
        assert_eq!(r.predecessor(0.7), Some(0.5));
        assert_eq!(r.predecessor(0.2), None);
    }

    #[test]
    fn rank_counts_less_or_equal() {
        let r = Rank1D::build(&[0.25, 0.5, 0.75], Interval::UNIT).unwrap();
        assert_eq!(r.rank(0.25), 1);
        assert_eq!(r.rank(0.6), 2);
        assert_eq!(r.rank(0.9), 3);
        assert_eq!(r.rank(-3.0), 0);
        assert_eq!(r.rank(7.0), 3);
        assert_eq!(r.rank(f64::NAN), 0);
    }

    #[test]
    fn empty_input_ranks_zero() {
        let r = Rank1D::build(&[], Interval::UNIT).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.rank(0.5), 0);
        assert_eq!(r.rank(2.0), 0);
        assert_eq!(r.space().total_slots, 0);
    }

    #[test]
    fn rejects_values_outside_interval() {
        assert!(Rank1D::build(&[0.2, 1.2], Interval::UNIT).is_err());
        assert!(Rank1D::build(&[f64::NAN], Interval::UNIT).is_err());
        assert!(Interval::new(1.0, 0.0).is_err());
    }

    #[test]
    fn overflow_exactly_for_crowded_bins() {
        let vals = sample_values(20_000, 3);
        let r = Rank1D::build(&vals, Interval::UNIT).unwrap();
        let crowded: Vec<usize> = (0..r.len()).filter(|&b| r.occupancy(b) > MAX_DIRECT).collect();
        assert!(!crowded.is_empty());
        assert_eq!(r.overflow_bins(), crowded);
    }

    #[test]
    fn sorted_read_back() {
        let vals = sample_values(5_000, 8);
        let r = Rank1D::build(&vals, Interval::UNIT).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(r.sorted_values(), &sorted[..]);
    }

    #[test]
    fn degenerate_and_clustered_inputs() {
        let same = vec![0.4; 50];
        let r = Rank1D::build(&same, Interval::UNIT).unwrap();
        assert_eq!(r.rank(0.4), 50);
        assert_eq!(r.rank(0.39), 0);
        assert_eq!(r.space().fallback_bins, 1);

        let point = Rank1D::build(&same, Interval::new(0.4, 0.4).unwrap()).unwrap();
        assert_eq!(point.rank(0.4), 50);
        assert_eq!(point.rank(0.3), 0);

        let mut clustered: Vec<f64> = (0..40).map(|i| 0.5 + i as f64 * 1e-12).collect();
        clustered.extend(sample_values(100, 4));
        let r = Rank1D::build(&clustered, Interval::UNIT).unwrap();
        for x in clustered.iter().copied().chain(sample_values(1000, 5)) {
            assert_eq!(r.rank(x), oracle_rank(&clustered, x));
        }
    }

    #[test]
    fn space_is_linear_on_random_input() {
        let n = 100_000;
        let r = Rank1D::build(&sample_values(n, 11), Interval::UNIT).unwrap();
        let s = r.space();
        assert!(s.total_slots <= 10 * n, "{s:?}");
        assert_eq!(s.fallback_bins, 0);
    }

    #[test]
    fn multirank_hand_counts() {
        let pts = [[0.2, 0.8], [0.6, 0.4]];
        let m = MultiRank::build(&pts, &[Interval::UNIT, Interval::UNIT]).unwrap();
        assert_eq!(m.query(&[0.6, 0.8]).unwrap(), vec![2, 2]);
        assert_eq!(m.query(&[0.1, 0.1]).unwrap(), vec![0, 0]);
        assert!(m.query(&[0.1]).is_err());
    }

    #[test]
    fn multirank_three_dims_vs_oracle() {
        let raw = sample_values(3_000, 21);
        let pts: Vec<[f64; 3]> = raw.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let m = MultiRank::build(&pts, &[Interval::UNIT; 3]).unwrap();
        let slices: Vec<Vec<f64>> = (0..3).map(|k| pts.iter().map(|p| p[k]).collect()).collect();
        let qs = sample_values(30_000, 22);
        for q in qs.chunks(3) {
            let got = m.query(q).unwrap();
            for k in 0..3 {
                assert_eq!(got[k], oracle_rank(&slices[k], q[k]));
            }
        }
    }

    #[test]
    fn rank_translation() {
        let pts = sample_points(1000, 2).unwrap();
        let m = MultiRank::build_2d(&pts, [Interval::UNIT; 2]).unwrap();
        let whole = m
            .rank_translate_rect(&SemiOpenRect::new(-1.0, 2.0, -1.0, 2.0).unwrap())
            .unwrap();
        assert_eq!(
            whole,
            RankRect {
                i1: 0,
                i2: 1000,
                j1: 0,
                j2: 1000
            }
        );
        let flat = m.translate(&SemiOpenRect::new(0.3, 0.3, 0.1, 0.9).unwrap());
        assert_eq!(flat.i1, flat.i2);
    }

    proptest! {
        #[test]
        fn rank_is_exact_and_monotone(
            vals in prop::collection::vec(0.0f64..=1.0, 0..300),
            mut xs in prop::collection::vec(-0.1f64..1.1, 1..50),
        ) {
            let r = Rank1D::build(&vals, Interval::UNIT).unwrap();
            xs.sort_by(f64::total_cmp);
            let mut prev = 0;
            for &x in &xs {
                let got = r.rank(x);
                prop_assert_eq!(got, oracle_rank(&vals, x));
                prop_assert!(got >= prev);
                prev = got;
            }
        }

        #[test]
        fn rank_difference_counts_half_open_interval(
            vals in prop::collection::vec(0.0f64..=1.0, 1..200),
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let r = Rank1D::build(&vals, Interval::UNIT).unwrap();
            let inside = vals.iter().filter(|&&v| a < v && v <= b).count();
            prop_assert_eq!(r.rank(b) - r.rank(a), inside);
        }
    }
}
