//! Three-level range tree answering rectangle emptiness with at most four
//! quadrant probes.
//!
//! The top tree is a complete binary tree over the x-order of the points.
//! Every top node below the root owns a secondary tree over the y-order of
//! its points, and every secondary node owns four staircases plus rank
//! directories for both axes. A query splits at the x-LCA, then at the y-LCA
//! inside each of the two children, leaving four quadrants.
//!
//! All directories share one [`RankArena`] and all staircases one pool, so a
//! node costs a few fixed-size records regardless of its size.

mod lca;

pub use lca::{lca_leafrange, leaf_span};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geom::{SemiOpenRect, UnitPoint};
use crate::rank::{DirRef, Interval, RankArena};
use crate::rankspace::{fill_staircase, staircase_nonempty, Orientation};
use lca::lca;

#[derive(Debug, Clone, Copy, Default)]
struct TopNode {
    start: u32,
    len: u32,
    /// Offset of this node's points, in y-order, in `y_order`.
    order: u32,
    s_pad: u32,
    /// Offset of the secondary tree's heap array in `secs`.
    secs: u32,
    x_lo: f64,
    x_hi: f64,
    y_dir: DirRef,
}

#[derive(Debug, Clone, Copy, Default)]
struct SecNode {
    len: u32,
    stairs: u32,
    y_lo: f64,
    y_hi: f64,
    x_dir: DirRef,
    y_dir: DirRef,
}

/// One step of a query: a single point test or a quadrant probe.
#[derive(Debug, Clone, Copy)]
enum Leg {
    Point(usize),
    Quadrant {
        top: usize,
        sec: usize,
        orientation: Orientation,
    },
}

/// Probe counters of one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RangeProbes {
    pub quadrant_probes: usize,
    pub point_tests: usize,
}

/// One piece of a decomposed query: the points of a node and the region
/// they are tested against.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPart {
    /// `None` for a direct point test.
    pub orientation: Option<Orientation>,
    pub region: SemiOpenRect,
    pub points: Vec<UnitPoint>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RangeTreeSpace {
    pub points: usize,
    pub top_nodes: usize,
    pub secondary_nodes: usize,
    pub staircase_entries: usize,
    pub bytes: usize,
}

#[derive(Debug, Clone)]
pub struct RangeTree3 {
    cell: SemiOpenRect,
    xs: Vec<f64>,
    ys: Vec<f64>,
    n_pad: usize,
    x_rank: DirRef,
    tops: Vec<TopNode>,
    secs: Vec<SecNode>,
    y_order: Vec<u32>,
    stairs: Vec<u32>,
    arena: RankArena,
}

/// Build scratch reused across secondary trees.
#[derive(Default)]
struct Scratch {
    yids: Vec<u32>,
    pos_of: Vec<u32>,
    cur: Vec<u32>,
    next: Vec<u32>,
}

fn orientation(left_x: bool, low_y: bool) -> Orientation {
    match (left_x, low_y) {
        (true, true) => Orientation::HighXHighY,
        (true, false) => Orientation::HighXLowY,
        (false, true) => Orientation::LowXHighY,
        (false, false) => Orientation::LowXLowY,
    }
}

fn high_x(o: Orientation) -> bool {
    matches!(o, Orientation::HighXLowY | Orientation::HighXHighY)
}

fn high_y(o: Orientation) -> bool {
    matches!(o, Orientation::LowXHighY | Orientation::HighXHighY)
}

fn offset(v: usize) -> u32 {
    u32::try_from(v).expect("range tree exceeds u32 addressing")
}

impl RangeTree3 {
    /// Builds over `points`, all inside the closure of `cell`.
    pub fn build(points: &[UnitPoint], cell: SemiOpenRect) -> Result<Self> {
        let bx = Interval::new(cell.x_lo, cell.x_hi)?;
        let by = Interval::new(cell.y_lo, cell.y_hi)?;
        if let Some((i, p)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| !(bx.contains(p.x) && by.contains(p.y)))
        {
            return Err(invalid(format!("point {i} ({}, {}) lies outside the cell", p.x, p.y)));
        }
        let k = points.len();
        let mut by_x: Vec<usize> = (0..k).collect();
        by_x.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
        let mut tree = RangeTree3 {
            cell,
            xs: by_x.iter().map(|&i| points[i].x).collect(),
            ys: by_x.iter().map(|&i| points[i].y).collect(),
            n_pad: 0,
            x_rank: DirRef::default(),
            tops: Vec::new(),
            secs: Vec::new(),
            y_order: Vec::new(),
            stairs: Vec::new(),
            arena: RankArena::new(),
        };
        if k == 0 {
            return Ok(tree);
        }
        tree.n_pad = k.next_power_of_two();
        tree.x_rank = tree.arena.push(tree.xs.iter().copied(), cell.x_lo, cell.x_hi);
        tree.tops = vec![TopNode::default(); 2 * tree.n_pad];

        let ys = &tree.ys;
        let mut root: Vec<u32> = (0..k as u32).collect();
        root.sort_by(|&a, &b| ys[a as usize].total_cmp(&ys[b as usize]).then(a.cmp(&b)));
        tree.y_order = root;

        let mut scratch = Scratch::default();
        for h in 1..2 * tree.n_pad {
            tree.build_top(h, &mut scratch);
        }
        tree.arena.finish();
        tree.secs.shrink_to_fit();
        tree.y_order.shrink_to_fit();
        tree.stairs.shrink_to_fit();
        Ok(tree)
    }

    fn build_top(&mut self, h: usize, scratch: &mut Scratch) {
        let k = self.xs.len();
        let depth = usize::BITS - 1 - h.leading_zeros();
        let span = self.n_pad >> depth;
        let first = (h - (1 << depth)) * span;
        let (start, end) = (first.min(k), (first + span).min(k));
        let len = end - start;
        if len == 0 {
            return;
        }
        let order = if h == 1 {
            0
        } else {
            let parent = self.tops[h / 2];
            let off = self.y_order.len();
            for idx in parent.order as usize..(parent.order + parent.len) as usize {
                let id = self.y_order[idx] as usize;
                if (start..end).contains(&id) {
                    self.y_order.push(id as u32);
                }
            }
            off
        };
        let ys = &self.ys;
        let y_dir = self.arena.push(
            self.y_order[order..order + len].iter().map(|&id| ys[id as usize]),
            self.cell.y_lo,
            self.cell.y_hi,
        );
        let mut node = TopNode {
            start: start as u32,
            len: len as u32,
            order: offset(order),
            s_pad: 0,
            secs: 0,
            x_lo: if start > 0 { self.xs[start - 1] } else { self.cell.x_lo },
            x_hi: if end < k { self.xs[end] } else { self.cell.x_hi },
            y_dir,
        };
        // the root's secondary is never probed, single points are tested directly
        if h > 1 && len >= 2 {
            self.build_secondary(&mut node, scratch);
        }
        self.tops[h] = node;
    }

    /// Bottom-up merge over the y-order of the node's points; each merged
    /// block is one secondary node, its ids sorted by x-rank.
    fn build_secondary(&mut self, node: &mut TopNode, sc: &mut Scratch) {
        let s = node.len as usize;
        let start = node.start as usize;
        let s_pad = s.next_power_of_two();
        let base = self.secs.len();
        node.s_pad = s_pad as u32;
        node.secs = offset(base);
        self.secs.resize(base + 2 * s_pad, SecNode::default());

        sc.yids.clear();
        sc.yids
            .extend_from_slice(&self.y_order[node.order as usize..node.order as usize + s]);
        sc.pos_of.clear();
        sc.pos_of.resize(s, 0);
        for (p, &id) in sc.yids.iter().enumerate() {
            sc.pos_of[id as usize - start] = p as u32;
        }
        sc.cur.clear();
        sc.cur.extend_from_slice(&sc.yids);

        let mut w = 1;
        while w < s_pad {
            for (b, ps) in (0..s).step_by(w).enumerate() {
                let pe = (ps + w).min(s);
                let t = pe - ps;
                let xs = &self.xs;
                let ys = &self.ys;
                let block = &sc.cur[ps..pe];
                let y_lo = if ps > 0 {
                    ys[sc.yids[ps - 1] as usize]
                } else {
                    self.cell.y_lo
                };
                let y_hi = if pe < s {
                    ys[sc.yids[pe] as usize]
                } else {
                    self.cell.y_hi
                };
                let x_dir = self
                    .arena
                    .push(block.iter().map(|&id| xs[id as usize]), node.x_lo, node.x_hi);
                let y_dir = self
                    .arena
                    .push(sc.yids[ps..pe].iter().map(|&id| ys[id as usize]), y_lo, y_hi);
                let sbase = self.stairs.len();
                self.stairs.resize(sbase + 4 * t, 0);
                for o in Orientation::ALL {
                    let local = block.iter().map(|&id| sc.pos_of[id as usize - start] - ps as u32 + 1);
                    let out = &mut self.stairs[sbase + o.index() * t..sbase + (o.index() + 1) * t];
                    fill_staircase(local, o, out);
                }
                self.secs[base + s_pad / w + b] = SecNode {
                    len: t as u32,
                    stairs: offset(sbase),
                    y_lo,
                    y_hi,
                    x_dir,
                    y_dir,
                };
            }
            if 2 * w < s_pad {
                merge_blocks(&sc.cur, &mut sc.next, w);
                std::mem::swap(&mut sc.cur, &mut sc.next);
            }
            w *= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty_set(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn cell(&self) -> SemiOpenRect {
        self.cell
    }

    /// The stored points in x-order.
    pub fn points(&self) -> Vec<UnitPoint> {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| UnitPoint { x, y })
            .collect()
    }

    #[inline]
    pub fn is_empty(&self, q: &SemiOpenRect) -> bool {
        !self.walk(q, &mut |leg| self.leg_nonempty(leg, q))
    }

    pub fn is_empty_traced(&self, q: &SemiOpenRect, probes: &mut RangeProbes) -> bool {
        !self.walk(q, &mut |leg| {
            match leg {
                Leg::Point(_) => probes.point_tests += 1,
                Leg::Quadrant { .. } => probes.quadrant_probes += 1,
            }
            self.leg_nonempty(leg, q)
        })
    }

    /// Every piece the query is split into, without short-circuiting.
    pub fn decompose(&self, q: &SemiOpenRect) -> Vec<QueryPart> {
        let mut legs = Vec::new();
        self.walk(q, &mut |leg| {
            legs.push(leg);
            false
        });
        legs.into_iter().map(|leg| self.part(leg, q)).collect()
    }

    /// Visits the legs of `q` until `visit` returns true; returns whether it did.
    fn walk(&self, q: &SemiOpenRect, visit: &mut impl FnMut(Leg) -> bool) -> bool {
        if self.xs.is_empty() {
            return false;
        }
        let i1 = self.arena.rank(self.x_rank, self.cell.x_lo, self.cell.x_hi, q.x_lo);
        let i2 = self.arena.rank(self.x_rank, self.cell.x_lo, self.cell.x_hi, q.x_hi);
        if i1 >= i2 {
            return false;
        }
        if i2 == i1 + 1 {
            return visit(Leg::Point(i1));
        }
        let u = lca(self.n_pad, i1 + 1, i2);
        self.walk_side(2 * u, true, q, visit) || self.walk_side(2 * u + 1, false, q, visit)
    }

    fn walk_side(&self, h: usize, left: bool, q: &SemiOpenRect, visit: &mut impl FnMut(Leg) -> bool) -> bool {
        let t = &self.tops[h];
        if t.len == 0 {
            return false;
        }
        let j1 = self.arena.rank(t.y_dir, self.cell.y_lo, self.cell.y_hi, q.y_lo);
        let j2 = self.arena.rank(t.y_dir, self.cell.y_lo, self.cell.y_hi, q.y_hi);
        if j1 >= j2 {
            return false;
        }
        if j2 == j1 + 1 {
            return visit(Leg::Point(self.y_order[t.order as usize + j1] as usize));
        }
        let u = lca(t.s_pad as usize, j1 + 1, j2);
        visit(Leg::Quadrant {
            top: h,
            sec: 2 * u,
            orientation: orientation(left, true),
        }) || visit(Leg::Quadrant {
            top: h,
            sec: 2 * u + 1,
            orientation: orientation(left, false),
        })
    }

    #[inline]
    fn leg_nonempty(&self, leg: Leg, q: &SemiOpenRect) -> bool {
        match leg {
            Leg::Point(i) => q.contains(UnitPoint {
                x: self.xs[i],
                y: self.ys[i],
            }),
            Leg::Quadrant { top, sec, orientation } => {
                let t = &self.tops[top];
                let sn = &self.secs[t.secs as usize + sec];
                let xq = if high_x(orientation) { q.x_lo } else { q.x_hi };
                let yq = if high_y(orientation) { q.y_lo } else { q.y_hi };
                let i = self.arena.rank(sn.x_dir, t.x_lo, t.x_hi, xq);
                let j = self.arena.rank(sn.y_dir, sn.y_lo, sn.y_hi, yq);
                let len = sn.len as usize;
                let off = sn.stairs as usize + orientation.index() * len;
                staircase_nonempty(orientation, &self.stairs[off..off + len], i, j)
            }
        }
    }

    fn part(&self, leg: Leg, q: &SemiOpenRect) -> QueryPart {
        match leg {
            Leg::Point(i) => QueryPart {
                orientation: None,
                region: *q,
                points: vec![UnitPoint {
                    x: self.xs[i],
                    y: self.ys[i],
                }],
            },
            Leg::Quadrant { top, sec, orientation } => {
                let t = &self.tops[top];
                let (first, last) = leaf_span(t.s_pad as usize, sec);
                let last = last.min(t.len as usize);
                let order = t.order as usize;
                let points = self.y_order[order + first - 1..order + last]
                    .iter()
                    .map(|&id| UnitPoint {
                        x: self.xs[id as usize],
                        y: self.ys[id as usize],
                    })
                    .collect();
                let (inf, ninf) = (f64::INFINITY, f64::NEG_INFINITY);
                let region = SemiOpenRect {
                    x_lo: if high_x(orientation) { q.x_lo } else { ninf },
                    x_hi: if high_x(orientation) { inf } else { q.x_hi },
                    y_lo: if high_y(orientation) { q.y_lo } else { ninf },
                    y_hi: if high_y(orientation) { inf } else { q.y_hi },
                };
                QueryPart {
                    orientation: Some(orientation),
                    region,
                    points,
                }
            }
        }
    }

    pub fn space(&self) -> RangeTreeSpace {
        RangeTreeSpace {
            points: self.xs.len(),
            top_nodes: self.tops.iter().filter(|t| t.len > 0).count(),
            secondary_nodes: self.secs.iter().filter(|s| s.len > 0).count(),
            staircase_entries: self.stairs.len(),
            bytes: self.heap_bytes(),
        }
    }

    pub fn heap_bytes(&self) -> usize {
        use std::mem::size_of;
        (self.xs.capacity() + self.ys.capacity()) * size_of::<f64>()
            + self.tops.capacity() * size_of::<TopNode>()
            + self.secs.capacity() * size_of::<SecNode>()
            + (self.y_order.capacity() + self.stairs.capacity()) * size_of::<u32>()
            + self.arena.heap_bytes()
    }
}

/// Merges adjacent sorted blocks of width `w` in `src` into blocks of `2w`.
fn merge_blocks(src: &[u32], dst: &mut Vec<u32>, w: usize) {
    dst.clear();
    for a in (0..src.len()).step_by(2 * w) {
        let mid = (a + w).min(src.len());
        let end = (a + 2 * w).min(src.len());
        let (mut i, mut j) = (a, mid);
        while i < mid && j < end {
            if src[i] <= src[j] {
                dst.push(src[i]);
                i += 1;
            } else {
                dst.push(src[j]);
                j += 1;
            }
        }
        dst.extend_from_slice(&src[i..mid]);
        dst.extend_from_slice(&src[j..end]);
    }
}
