//! High fan-out slab tree for rectangle emptiness in rank space.
//!
//! A node over `len` points (its own local rank space) cuts x into slabs of
//! `delta = ⌈len^(1-eps/2)⌉` points and stores a crossing store for every
//! contiguous run of slabs. The crossing store of a single slab doubles as
//! the y-rank translation into that child. Children are built recursively
//! down to single points.

use serde::Serialize;

use super::crossing::crossing_count;
use super::Permutation;
use crate::error::{invalid, Result};
use crate::geom::RankRect;

/// Slab width for a node of `len >= 2` points.
///
/// Capped at `⌈len/2⌉` so every internal node has at least two children;
/// without the cap small nodes (e.g. `len = 3` at `eps = 0.5`) would get a
/// single slab and never shrink.
pub fn delta_for(len: usize, eps: f64) -> usize {
    assert!(len >= 2);
    let t = (len as f64).powf(1.0 - eps / 2.0);
    // absorb powf rounding so exact powers (16^0.75 = 8) are not bumped up
    let d = (t - 1e-9).ceil().max(1.0) as usize;
    d.min(len.div_ceil(2))
}

#[derive(Debug, Clone, Copy)]
struct Node {
    len: u32,
    delta: u32,
    fanout: u32,
    first_child: u32,
    /// Offset of the pair-table in the pool; for a leaf, the point's y (always 1).
    stores: u32,
}

#[derive(Debug, Clone)]
pub struct SlabTree {
    eps: f64,
    nodes: Vec<Node>,
    pool: Vec<u32>,
    depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlabTreeStats {
    pub n: usize,
    pub nodes: usize,
    pub depth: usize,
    pub root_delta: usize,
    pub root_fanout: usize,
    pub pool_entries: usize,
}

/// Index of the pair `(a, b)`, `a <= b < m`, in row-major upper-triangle order.
#[inline]
fn pair_index(a: usize, b: usize, m: usize) -> usize {
    a * m - a * a.saturating_sub(1) / 2 + (b - a)
}

impl SlabTree {
    pub fn build(perm: &Permutation, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
        }
        let mut tree = SlabTree {
            eps,
            nodes: Vec::new(),
            pool: Vec::new(),
            depth: 0,
        };
        if perm.is_empty() {
            return Ok(tree);
        }
        tree.nodes.push(Node {
            len: 0,
            delta: 0,
            fanout: 0,
            first_child: 0,
            stores: 0,
        });
        tree.depth = tree.build_node(0, perm.ys().to_vec());
        tree.nodes.shrink_to_fit();
        tree.pool.shrink_to_fit();
        Ok(tree)
    }

    /// Fills node `id` for the local permutation `ys`; returns subtree depth.
    fn build_node(&mut self, id: usize, ys: Vec<u32>) -> usize {
        let len = ys.len();
        if len == 1 {
            self.nodes[id] = Node {
                len: 1,
                delta: 1,
                fanout: 0,
                first_child: 0,
                stores: ys[0],
            };
            return 0;
        }
        let delta = delta_for(len, self.eps);
        let m = len.div_ceil(delta);
        let width = len + 1;
        let base = self.pool.len();
        self.pool.resize(base + m * (m + 1) / 2 * width, 0);

        // diagonal: per-slab indicator prefix sums
        for (x, &y) in ys.iter().enumerate() {
            let s = x / delta;
            let off = base + pair_index(s, s, m) * width;
            self.pool[off + y as usize] = 1;
        }
        for s in 0..m {
            let off = base + pair_index(s, s, m) * width;
            for j in 1..width {
                self.pool[off + j] += self.pool[off + j - 1];
            }
        }
        // runs a..=b from a..=b-1 plus slab b
        for a in 0..m {
            for b in a + 1..m {
                let dst = base + pair_index(a, b, m) * width;
                let left = base + pair_index(a, b - 1, m) * width;
                let right = base + pair_index(b, b, m) * width;
                for j in 0..width {
                    self.pool[dst + j] = self.pool[left + j] + self.pool[right + j];
                }
            }
        }

        let first_child = self.nodes.len();
        self.nodes[id] = Node {
            len: len as u32,
            delta: delta as u32,
            fanout: m as u32,
            first_child: first_child as u32,
            stores: u32::try_from(base).expect("slab tree pool exceeds u32 addressing"),
        };
        self.nodes.extend((0..m).map(|_| Node {
            len: 0,
            delta: 0,
            fanout: 0,
            first_child: 0,
            stores: 0,
        }));

        let mut deepest = 0;
        for s in 0..m {
            let lo = s * delta;
            let hi = ((s + 1) * delta).min(len);
            let diag = base + pair_index(s, s, m) * width;
            let child: Vec<u32> = ys[lo..hi].iter().map(|&y| self.pool[diag + y as usize]).collect();
            deepest = deepest.max(self.build_node(first_child + s, child));
        }
        deepest + 1
    }

    pub fn len(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.len as usize)
    }

    pub fn is_empty_set(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of internal levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn stats(&self) -> SlabTreeStats {
        let root = self.nodes.first();
        SlabTreeStats {
            n: self.len(),
            nodes: self.nodes.len(),
            depth: self.depth,
            root_delta: root.map_or(0, |r| r.delta as usize),
            root_fanout: root.map_or(0, |r| r.fanout as usize),
            pool_entries: self.pool.len(),
        }
    }

    pub fn heap_bytes(&self) -> usize {
        self.nodes.capacity() * std::mem::size_of::<Node>() + self.pool.capacity() * std::mem::size_of::<u32>()
    }

    /// Emptiness of `(i1, i2] × (j1, j2]`.
    #[inline]
    pub fn is_empty(&self, q: &RankRect) -> bool {
        let mut probes = 0;
        self.is_empty_counted(q, &mut probes)
    }

    /// Like [`SlabTree::is_empty`], adding the number of crossing-store
    /// probes to `probes`.
    pub fn is_empty_counted(&self, q: &RankRect, probes: &mut usize) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        self.empty_at(0, q.i1, q.i2, q.j1, q.j2, probes)
    }

    fn empty_at(&self, id: usize, i1: usize, i2: usize, j1: usize, j2: usize, probes: &mut usize) -> bool {
        let node = self.nodes[id];
        let len = node.len as usize;
        let (i1, i2, j1, j2) = (i1.min(len), i2.min(len), j1.min(len), j2.min(len));
        if i1 >= i2 || j1 >= j2 {
            return true;
        }
        if len == 1 {
            // x is (0, 1] here; test y directly
            let y = node.stores as usize;
            return !(j1 < y && y <= j2);
        }
        let delta = node.delta as usize;
        let m = node.fanout as usize;
        let width = len + 1;
        let base = node.stores as usize;
        let store = |a: usize, b: usize| {
            let off = base + pair_index(a, b, m) * width;
            &self.pool[off..off + width]
        };

        let first = i1 / delta;
        let last = (i2 - 1) / delta;
        let full_lo = if i1 % delta == 0 { first } else { first + 1 };
        let full_hi = if i2 == ((last + 1) * delta).min(len) {
            last + 1
        } else {
            last
        };

        if full_lo < full_hi {
            *probes += 1;
            if crossing_count(store(full_lo, full_hi - 1), j1, j2) > 0 {
                return false;
            }
        }
        let descend = |s: usize, probes: &mut usize| {
            let off = s * delta;
            let diag = store(s, s);
            self.empty_at(
                node.first_child as usize + s,
                i1.saturating_sub(off),
                i2 - off,
                diag[j1] as usize,
                diag[j2] as usize,
                probes,
            )
        };
        if first == last {
            let covered = full_lo == first && full_hi == first + 1;
            return covered || descend(first, probes);
        }
        if full_lo > first && !descend(first, probes) {
            return false;
        }
        if full_hi <= last && !descend(last, probes) {
            return false;
        }
        true
    }
}
