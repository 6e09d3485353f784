//! Flat storage for many rank directories.
//!
//! Range trees hold two rank directories per node and there are hundreds of
//! thousands of nodes per grid cell, so directories live in shared vectors
//! and are addressed by a small [`DirRef`].

use super::level::{bin_of, build_level, level_rank, MAX_DIRECT};

/// Handle to one top-level directory inside a [`RankArena`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct DirRef {
    pub len: u32,
    starts: u32,
    values: u32,
    levels: u32,
    nlevels: u32,
}

/// Second-level directory of one overloaded top-level bin.
#[derive(Debug, Clone, Copy)]
struct LevelEntry {
    bin: u32,
    bins: u32,
    starts: u32,
    alpha: u32,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct DirSpace {
    pub top_slots: usize,
    pub level_slots: usize,
    pub overflow_bins: usize,
    pub fallback_bins: usize,
    pub max_alpha: u32,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RankArena {
    starts: Vec<u32>,
    values: Vec<f64>,
    levels: Vec<LevelEntry>,
    scratch: Vec<u32>,
    cursor: Vec<u32>,
}

fn offset(len: usize) -> u32 {
    u32::try_from(len).expect("rank arena exceeds u32 addressing")
}

impl RankArena {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a directory over `values` (any order) for the interval `[lo, hi]`.
    /// Callers validate that every value lies in the interval.
    pub fn push(&mut self, values: impl ExactSizeIterator<Item = f64> + Clone, lo: f64, hi: f64) -> DirRef {
        let n = values.len();
        if n == 0 {
            return DirRef::default();
        }
        let sbase = self.starts.len();
        let vbase = self.values.len();
        let lbase = self.levels.len();

        // one counting pass: bin of each value, occupancy, prefix sums
        self.scratch.clear();
        self.scratch.extend(
            values
                .clone()
                .map(|v| if hi > lo { bin_of(v, lo, hi, n) as u32 } else { 0 }),
        );
        self.starts.resize(sbase + n + 1, 0);
        for &b in &self.scratch {
            self.starts[sbase + b as usize + 1] += 1;
        }
        for b in 0..n {
            self.starts[sbase + b + 1] += self.starts[sbase + b];
        }
        self.cursor.clear();
        self.cursor.extend_from_slice(&self.starts[sbase..sbase + n]);
        self.values.resize(vbase + n, 0.0);
        for (v, &b) in values.zip(self.scratch.iter()) {
            let c = &mut self.cursor[b as usize];
            self.values[vbase + *c as usize] = v;
            *c += 1;
        }

        for b in 0..n {
            let s = self.starts[sbase + b] as usize;
            let e = self.starts[sbase + b + 1] as usize;
            let count = e - s;
            if count < 2 {
                continue;
            }
            let slice = &mut self.values[vbase + s..vbase + e];
            slice.sort_unstable_by(f64::total_cmp);
            if count > MAX_DIRECT {
                let width = (hi - lo) / n as f64;
                let blo = (lo + width * b as f64).min(slice[0]);
                let bhi = (lo + width * (b + 1) as f64).max(slice[count - 1]);
                let lstart = self.starts.len();
                let shape = build_level(&self.values[vbase + s..vbase + e], blo, bhi, &mut self.starts);
                self.levels.push(LevelEntry {
                    bin: b as u32,
                    bins: shape.bins as u32,
                    starts: offset(lstart),
                    alpha: shape.alpha,
                    lo: blo,
                    hi: bhi,
                });
            }
        }

        DirRef {
            len: offset(n),
            starts: offset(sbase),
            values: offset(vbase),
            levels: offset(lbase),
            nlevels: offset(self.levels.len() - lbase),
        }
    }

    /// Number of values of the directory that are `<= x`.
    #[inline]
    pub fn rank(&self, d: DirRef, lo: f64, hi: f64, x: f64) -> usize {
        let n = d.len as usize;
        if n == 0 || !(x >= lo) {
            return 0;
        }
        if x >= hi {
            return n;
        }
        let b = bin_of(x, lo, hi, n);
        let starts = &self.starts[d.starts as usize..];
        let s = starts[b] as usize;
        let e = starts[b + 1] as usize;
        let vals = &self.values[d.values as usize + s..d.values as usize + e];
        if vals.len() <= MAX_DIRECT {
            return s + vals.iter().take_while(|&&v| v <= x).count();
        }
        let lvl = self.level_of(d, b);
        s + level_rank(
            vals,
            &self.starts[lvl.starts as usize..],
            lvl.lo,
            lvl.hi,
            lvl.bins as usize,
            x,
        )
    }

    fn levels_of(&self, d: DirRef) -> &[LevelEntry] {
        &self.levels[d.levels as usize..(d.levels + d.nlevels) as usize]
    }

    fn level_of(&self, d: DirRef, b: usize) -> &LevelEntry {
        let levels = self.levels_of(d);
        let i = levels.partition_point(|l| (l.bin as usize) < b);
        &levels[i]
    }

    /// Stored values, bin by bin; ascending overall.
    pub fn values(&self, d: DirRef) -> &[f64] {
        &self.values[d.values as usize..(d.values + d.len) as usize]
    }

    pub fn occupancy(&self, d: DirRef, b: usize) -> usize {
        let s = &self.starts[d.starts as usize..];
        (s[b + 1] - s[b]) as usize
    }

    pub fn overflow_bins(&self, d: DirRef) -> Vec<usize> {
        self.levels_of(d).iter().map(|l| l.bin as usize).collect()
    }

    pub fn space(&self, d: DirRef) -> DirSpace {
        if d.len == 0 {
            return DirSpace::default();
        }
        let n = d.len as usize;
        let levels = self.levels_of(d);
        DirSpace {
            top_slots: 2 * n + 1,
            level_slots: levels
                .iter()
                .map(|l| if l.bins == 0 { 0 } else { l.bins as usize + 1 })
                .sum(),
            overflow_bins: levels.len(),
            fallback_bins: levels.iter().filter(|l| l.bins == 0).count(),
            max_alpha: levels.iter().map(|l| l.alpha).max().unwrap_or(1),
        }
    }

    pub fn heap_bytes(&self) -> usize {
        self.starts.capacity() * std::mem::size_of::<u32>()
            + self.values.capacity() * std::mem::size_of::<f64>()
            + self.levels.capacity() * std::mem::size_of::<LevelEntry>()
    }

    /// Drops build scratch and trims the pools.
    pub fn finish(&mut self) {
        self.scratch = Vec::new();
        self.cursor = Vec::new();
        self.starts.shrink_to_fit();
        self.values.shrink_to_fit();
        self.levels.shrink_to_fit();
    }
}
