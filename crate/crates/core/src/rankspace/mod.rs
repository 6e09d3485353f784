//! Emptiness structures for point sets in 2-d rank space.
//!
//! A rank-space set of `n` points is a permutation: the point with x-rank
//! `i` has y-rank `ys[i-1]`, both 1-based.

mod crossing;
mod quadrant;
mod slab;

pub use crossing::CrossingStore;
pub(crate) use quadrant::{fill_staircase, staircase_nonempty};
pub use quadrant::{Orientation, QuadrantStore, Staircase};
pub use slab::{delta_for, SlabTree, SlabTreeStats};

use crate::error::{invalid, Result};
use crate::geom::{RankPoint, UnitPoint};

/// A validated permutation of `1..=n` giving the y-rank of each x-rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    ys: Vec<u32>,
}

impl Permutation {
    pub fn new(ys: Vec<u32>) -> Result<Self> {
        let n = ys.len();
        let mut seen = vec![false; n + 1];
        for &y in &ys {
            let y = y as usize;
            if y == 0 || y > n || seen[y] {
                return Err(invalid(format!(
                    "not a permutation of 1..={n}: bad or repeated value {y}"
                )));
            }
            seen[y] = true;
        }
        Ok(Self { ys })
    }

    pub(crate) fn new_unchecked(ys: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(ys.clone()).is_ok());
        Self { ys }
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// `ys()[i-1]` is the y-rank of the point with x-rank `i`.
    pub fn ys(&self) -> &[u32] {
        &self.ys
    }

    pub fn points(&self) -> impl Iterator<Item = RankPoint> + '_ {
        self.ys.iter().enumerate().map(|(i, &y)| RankPoint {
            i: i + 1,
            j: y as usize,
        })
    }

    /// The point set mirrored left to right.
    pub fn reflect_x(&self) -> Self {
        Self {
            ys: self.ys.iter().rev().copied().collect(),
        }
    }
}

/// Maps points to rank space. Equal coordinates are ordered by input index,
/// so the result is always a permutation.
pub fn to_rank_space(points: &[UnitPoint]) -> Permutation {
    let n = points.len();
    let mut by_x: Vec<u32> = (0..n as u32).collect();
    by_x.sort_by(|&a, &b| points[a as usize].x.total_cmp(&points[b as usize].x).then(a.cmp(&b)));
    let mut by_y: Vec<u32> = (0..n as u32).collect();
    by_y.sort_by(|&a, &b| points[a as usize].y.total_cmp(&points[b as usize].y).then(a.cmp(&b)));
    let mut y_rank = vec![0u32; n];
    for (r, &idx) in by_y.iter().enumerate() {
        y_rank[idx as usize] = r as u32 + 1;
    }
    Permutation::new_unchecked(by_x.iter().map(|&idx| y_rank[idx as usize]).collect())
}
