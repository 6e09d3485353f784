use crate::error::Result;
use crate::geom::{SemiOpenRect, UnitPoint};
use crate::rangetree::{RangeProbes, RangeTree3};
use crate::rank::{Interval, MultiRank};
use crate::rankspace::{to_rank_space, SlabTree};

use super::Variant;

/// Probe counters for one cell query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CellTrace {
    pub crossing_probes: usize,
    pub quadrant_probes: usize,
    pub point_tests: usize,
}

/// Emptiness structure for the points of one grid cell.
#[derive(Debug, Clone)]
pub enum CellStore {
    Empty,
    /// Rank translation into the cell's rank space plus a slab tree.
    Slab {
        rank: MultiRank,
        tree: SlabTree,
    },
    Range(RangeTree3),
}

impl CellStore {
    /// Builds over `points`, which lie in the closure of `cell`.
    pub fn build(points: &[UnitPoint], cell: SemiOpenRect, variant: Variant, eps: f64) -> Result<Self> {
        if points.is_empty() {
            return Ok(CellStore::Empty);
        }
        Ok(match variant {
            Variant::Main1 => {
                let domain = [
                    Interval::new(cell.x_lo, cell.x_hi)?,
                    Interval::new(cell.y_lo, cell.y_hi)?,
                ];
                CellStore::Slab {
                    rank: MultiRank::build_2d(points, domain)?,
                    tree: SlabTree::build(&to_rank_space(points), eps)?,
                }
            }
            Variant::Main2 => CellStore::Range(RangeTree3::build(points, cell)?),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            CellStore::Empty => 0,
            CellStore::Slab { rank, .. } => rank.len(),
            CellStore::Range(t) => t.len(),
        }
    }

    pub fn is_empty_set(&self) -> bool {
        self.len() == 0
    }

    /// Emptiness of `q` restricted to this cell's points. `q` may extend
    /// past the cell; rank translation clamps it.
    #[inline]
    pub fn is_empty(&self, q: &SemiOpenRect) -> bool {
        match self {
            CellStore::Empty => true,
            CellStore::Slab { rank, tree } => tree.is_empty(&rank.translate(q)),
            CellStore::Range(t) => t.is_empty(q),
        }
    }

    pub fn is_empty_traced(&self, q: &SemiOpenRect, trace: &mut CellTrace) -> bool {
        match self {
            CellStore::Empty => true,
            CellStore::Slab { rank, tree } => tree.is_empty_counted(&rank.translate(q), &mut trace.crossing_probes),
            CellStore::Range(t) => {
                let mut p = RangeProbes::default();
                let empty = t.is_empty_traced(q, &mut p);
                trace.quadrant_probes += p.quadrant_probes;
                trace.point_tests += p.point_tests;
                empty
            }
        }
    }

    pub fn heap_bytes(&self) -> usize {
        match self {
            CellStore::Empty => 0,
            CellStore::Slab { rank, tree } => rank.heap_bytes() + tree.heap_bytes(),
            CellStore::Range(t) => t.heap_bytes(),
        }
    }
}
