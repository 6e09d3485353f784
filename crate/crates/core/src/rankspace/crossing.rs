use crate::error::{invalid, Error, Result};
use crate::geom::{RankPoint, RankRect};

/// Points in `(j1, j2]` of y for a prefix-count array `prefix[j] = |{y <= j}|`.
#[inline]
pub(crate) fn crossing_count(prefix: &[u32], j1: usize, j2: usize) -> usize {
    let n = prefix.len() - 1;
    let (j1, j2) = (j1.min(n), j2.min(n));
    if j1 >= j2 {
        return 0;
    }
    (prefix[j2] - prefix[j1]) as usize
}

/// Emptiness for queries that span the whole x-range `[alpha, beta]` of a
/// subset `Q` of an `n`-point rank-space set; only y matters, answered from
/// prefix counts over the global y-coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingStore {
    alpha: usize,
    beta: usize,
    prefix: Vec<u32>,
}

impl CrossingStore {
    pub fn build(points: &[RankPoint], alpha: usize, beta: usize, n: usize) -> Result<Self> {
        if alpha > beta {
            return Err(invalid(format!("slab range [{alpha}, {beta}] is reversed")));
        }
        let mut prefix = vec![0u32; n + 1];
        for p in points {
            if p.i < alpha || p.i > beta {
                return Err(invalid(format!("point x = {} outside slab [{alpha}, {beta}]", p.i)));
            }
            if p.j == 0 || p.j > n {
                return Err(invalid(format!("point y = {} outside 1..={n}", p.j)));
            }
            if prefix[p.j] != 0 {
                return Err(invalid(format!("repeated y = {}", p.j)));
            }
            prefix[p.j] = 1;
        }
        for j in 1..=n {
            prefix[j] += prefix[j - 1];
        }
        Ok(Self { alpha, beta, prefix })
    }

    /// Emptiness of `q ∩ Q`; `q` must cross the slab (`i1 < alpha`, `i2 >= beta`).
    pub fn is_empty(&self, q: &RankRect) -> Result<bool> {
        if !(q.i1 < self.alpha && q.i2 >= self.beta) {
            return Err(Error::NotCrossing {
                query: *q,
                alpha: self.alpha,
                beta: self.beta,
            });
        }
        Ok(crossing_count(&self.prefix, q.j1, q.j2) == 0)
    }

    /// `prefix()[j]` is the number of stored points with y <= j.
    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        *self.prefix.last().unwrap() as usize
    }

    pub fn is_empty_set(&self) -> bool {
        self.len() == 0
    }
}
