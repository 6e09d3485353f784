//! Brute-force ground truth. Nothing here calls into the structures it
//! checks; membership predicates are written out again on purpose.

use crate::geom::{RankRect, SemiOpenRect, UnitPoint};
use crate::rankspace::{Orientation, Permutation};

/// `|{v in values : v <= x}|` by a full scan.
pub fn oracle_rank(values: &[f64], x: f64) -> usize {
    values.iter().filter(|&&v| v <= x).count()
}

/// Sort-once rank oracle.
#[derive(Debug, Clone)]
pub struct RankOracle {
    sorted: Vec<f64>,
}

impl RankOracle {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in oracle input"));
        Self { sorted }
    }

    pub fn rank(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }
}

fn inside(r: &SemiOpenRect, p: &UnitPoint) -> bool {
    p.x > r.x_lo && p.x <= r.x_hi && p.y > r.y_lo && p.y <= r.y_hi
}

/// True iff no point lies in the semi-open rectangle `r`.
pub fn oracle_empty(points: &[UnitPoint], r: &SemiOpenRect) -> bool {
    !points.iter().any(|p| inside(r, p))
}

pub fn oracle_count(points: &[UnitPoint], r: &SemiOpenRect) -> usize {
    points.iter().filter(|p| inside(r, p)).count()
}

/// True iff no rank-space point `(i, perm[i])` lies in `r`.
pub fn oracle_empty_rank(perm: &Permutation, r: &RankRect) -> bool {
    !perm.ys().iter().enumerate().any(|(idx, &y)| {
        let (x, y) = (idx + 1, y as usize);
        x > r.i1 && x <= r.i2 && y > r.j1 && y <= r.j2
    })
}

/// Direct scan for one quadrant. The quadrant is `(0,i]` or `(i,n]` in x and
/// `(0,j]` or `(j,n]` in y, depending on `orientation`.
pub fn oracle_quadrant_empty(perm: &Permutation, orientation: Orientation, i: usize, j: usize) -> bool {
    let n = perm.len();
    let (xr, yr) = match orientation {
        Orientation::LowXLowY => ((0, i), (0, j)),
        Orientation::LowXHighY => ((0, i), (j, n)),
        Orientation::HighXLowY => ((i, n), (0, j)),
        Orientation::HighXHighY => ((i, n), (j, n)),
    };
    oracle_empty_rank(
        perm,
        &RankRect {
            i1: xr.0,
            i2: xr.1,
            j1: yr.0,
            j2: yr.1,
        },
    )
}

/// Staircase by direct scan: prefix min/max for the low-x orientations
/// (entry `i-1` covers x in `1..=i`), suffix min/max for the high-x ones
/// (entry `i` covers x in `i+1..=n`).
pub fn oracle_staircase(perm: &Permutation, orientation: Orientation) -> Vec<u32> {
    let ys = perm.ys();
    let n = ys.len();
    (0..n)
        .map(|k| {
            let span = match orientation {
                Orientation::LowXLowY | Orientation::LowXHighY => &ys[..=k],
                Orientation::HighXLowY | Orientation::HighXHighY => &ys[k..],
            };
            match orientation {
                Orientation::LowXLowY | Orientation::HighXLowY => *span.iter().min().unwrap(),
                Orientation::LowXHighY | Orientation::HighXHighY => *span.iter().max().unwrap(),
            }
        })
        .collect()
}

/// Emptiness oracle that sorts by x once and scans only the query's x-slab.
/// Used for sweeps too large for a full scan per query.
#[derive(Debug, Clone)]
pub struct SortedOracle {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SortedOracle {
    pub fn new(points: &[UnitPoint]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("NaN in oracle input"));
        Self {
            xs: pts.iter().map(|p| p.x).collect(),
            ys: pts.iter().map(|p| p.y).collect(),
        }
    }

    fn slab(&self, r: &SemiOpenRect) -> std::ops::Range<usize> {
        let a = self.xs.partition_point(|&x| x <= r.x_lo);
        let b = self.xs.partition_point(|&x| x <= r.x_hi);
        a..b.max(a)
    }

    pub fn empty(&self, r: &SemiOpenRect) -> bool {
        !self.ys[self.slab(r)].iter().any(|&y| y > r.y_lo && y <= r.y_hi)
    }

    pub fn count(&self, r: &SemiOpenRect) -> usize {
        self.ys[self.slab(r)]
            .iter()
            .filter(|&&y| y > r.y_lo && y <= r.y_hi)
            .count()
    }
}
