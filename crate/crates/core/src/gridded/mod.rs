//! Grid composition for uniformly random points.
//!
//! Queries of area above `w/N` are answered "nonempty" outright: with high
//! probability every such rectangle holds a point. Smaller queries are routed
//! to one of `log(N/w) + 1` grids whose cells all have area `w/N`, picked so
//! the query meets at most six cells, and each cell answers exactly.

mod cell;
mod net;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cell::{CellStore, CellTrace};
pub use net::{cell_counts, validate_net, NetReport};

use crate::error::{invalid, Error, Result};
use crate::geom::{clamp_query, Clamped, SemiOpenRect, UnitPoint};

/// Which per-cell backend to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Rank translation plus slab tree; `O(n log^(1+eps) n)` space.
    Main1,
    /// Three-level range tree; `O(n log n (log log n)^2)` space.
    Main2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    pub n: usize,
    /// Smallest power of two `>= n`.
    pub big_n: usize,
    /// `log2(big_n)`.
    pub h: u32,
    pub c1: f64,
    /// Smallest power of two `>= 4 * c1 * h`.
    pub w: usize,
    /// Number of grid levels; 0 when `w >= big_n`.
    pub level_count: usize,
}

impl GridParams {
    pub fn new(n: usize, c1: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("grid needs n >= 1"));
        }
        if !(c1 > 16.0 && c1.is_finite()) {
            return Err(invalid(format!("c1 must be a finite value > 16, got {c1}")));
        }
        let big_n = n.next_power_of_two();
        let h = big_n.trailing_zeros();
        let target = (4.0 * c1 * h as f64).ceil() as usize;
        let w = target.max(1).next_power_of_two();
        let level_count = if w >= big_n {
            0
        } else {
            (big_n / w).trailing_zeros() as usize + 1
        };
        Ok(Self {
            n,
            big_n,
            h,
            c1,
            w,
            level_count,
        })
    }

    /// True when the grid family is degenerate and a single backend is used.
    pub fn is_degenerate(&self) -> bool {
        self.w >= self.big_n
    }

    /// `w / N`: the area of every cell and the shortcut threshold.
    pub fn cell_area(&self) -> f64 {
        self.w as f64 / self.big_n as f64
    }

    /// `(cols, rows)` of level `i`.
    pub fn level_dims(&self, i: usize) -> (usize, usize) {
        (self.big_n / (self.w << i), 1 << i)
    }

    /// Smallest level whose cell width is at least `width`.
    pub fn level_for(&self, width: f64) -> usize {
        let mut j = 0;
        while j + 1 < self.level_count && width > self.cell_width(j) {
            j += 1;
        }
        j
    }

    pub fn cell_width(&self, i: usize) -> f64 {
        ((self.w << i) as f64) / self.big_n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuildOptions {
    pub variant: Variant,
    pub c1: f64,
    /// Slab-tree parameter, used by [`Variant::Main1`] only.
    pub eps: f64,
    /// Build cells on the rayon pool.
    pub parallel: bool,
}

impl BuildOptions {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            c1: 32.0,
            eps: 0.5,
            parallel: false,
        }
    }
}

/// Cell span of a clamped query at one level, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Span {
    c0: usize,
    c1: usize,
    r0: usize,
    r1: usize,
}

impl Span {
    fn count(&self) -> usize {
        (self.c1 - self.c0 + 1) * (self.r1 - self.r0 + 1)
    }
}

/// Geometry of one tiling; cells are `[lo, hi)` with the top and right
/// boundary folded into the last row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tiling {
    pub cols: usize,
    pub rows: usize,
}

impl Tiling {
    #[inline]
    fn col_of(&self, x: f64) -> usize {
        ((x * self.cols as f64) as usize).min(self.cols - 1)
    }

    #[inline]
    fn row_of(&self, y: f64) -> usize {
        ((y * self.rows as f64) as usize).min(self.rows - 1)
    }

    /// Row-major id of the cell holding `p`.
    #[inline]
    pub fn cell_of(&self, p: UnitPoint) -> usize {
        self.row_of(p.y) * self.cols + self.col_of(p.x)
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn cell_rect(&self, id: usize) -> SemiOpenRect {
        let (c, r) = (id % self.cols, id / self.cols);
        let (cw, ch) = (1.0 / self.cols as f64, 1.0 / self.rows as f64);
        SemiOpenRect {
            x_lo: c as f64 * cw,
            x_hi: (c + 1) as f64 * cw,
            y_lo: r as f64 * ch,
            y_hi: (r + 1) as f64 * ch,
        }
    }

    #[inline]
    fn span(&self, q: &SemiOpenRect) -> Span {
        Span {
            c0: self.col_of(q.x_lo),
            c1: self.col_of(q.x_hi),
            r0: self.row_of(q.y_lo),
            r1: self.row_of(q.y_hi),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridLevel {
    pub index: usize,
    pub tiling: Tiling,
    cells: Vec<CellStore>,
}

impl GridLevel {
    pub fn cells(&self) -> &[CellStore] {
        &self.cells
    }

    /// Ids of the cells a clamped query meets; more than six is an error.
    pub fn cells_overlapping(&self, q: &SemiOpenRect) -> Result<Vec<usize>> {
        let s = self.tiling.span(q);
        if s.count() > 6 {
            return Err(Error::TooManyCells {
                level: self.index,
                count: s.count(),
            });
        }
        Ok((s.r0..=s.r1)
            .flat_map(|r| (s.c0..=s.c1).map(move |c| r * self.tiling.cols + c))
            .collect())
    }
}

/// What one grid query did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryTrace {
    /// Answered "nonempty" by the area shortcut.
    pub shortcut: bool,
    /// Answered "empty" because the query misses the unit square.
    pub outside: bool,
    pub level: Option<usize>,
    /// Cells the query overlaps at the chosen level.
    pub cells: usize,
    /// Cells actually probed before the answer was known.
    pub cells_probed: usize,
    pub crossing_probes: usize,
    pub quadrant_probes: usize,
    /// Largest number of quadrant probes spent inside one cell.
    pub max_cell_quadrant_probes: usize,
    pub point_tests: usize,
}

#[derive(Debug, Clone)]
pub struct GridForest {
    params: GridParams,
    options: BuildOptions,
    levels: Vec<GridLevel>,
    single: Option<CellStore>,
}

/// Points grouped by cell: `points[starts[c]..starts[c + 1]]` lie in cell `c`.
fn bucket(points: &[UnitPoint], tiling: Tiling) -> (Vec<usize>, Vec<UnitPoint>) {
    let cells = tiling.cell_count();
    let mut starts = vec![0usize; cells + 1];
    let ids: Vec<usize> = points.iter().map(|&p| tiling.cell_of(p)).collect();
    for &c in &ids {
        starts[c + 1] += 1;
    }
    for c in 0..cells {
        starts[c + 1] += starts[c];
    }
    let mut cursor = starts.clone();
    let mut sorted = vec![UnitPoint { x: 0.0, y: 0.0 }; points.len()];
    for (&p, &c) in points.iter().zip(&ids) {
        sorted[cursor[c]] = p;
        cursor[c] += 1;
    }
    (starts, sorted)
}

fn check_points(points: &[UnitPoint]) -> Result<()> {
    match points.iter().position(|p| !p.in_unit_square()) {
        Some(i) => Err(invalid(format!(
            "point {i} ({}, {}) lies outside the unit square",
            points[i].x, points[i].y
        ))),
        None => Ok(()),
    }
}

fn check_options(opts: &BuildOptions) -> Result<()> {
    if opts.variant == Variant::Main1 && !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {}", opts.eps)));
    }
    Ok(())
}

fn build_cells(points: &[UnitPoint], tiling: Tiling, opts: &BuildOptions) -> Result<Vec<CellStore>> {
    let (starts, sorted) = bucket(points, tiling);
    let one = |c: usize| {
        CellStore::build(
            &sorted[starts[c]..starts[c + 1]],
            tiling.cell_rect(c),
            opts.variant,
            opts.eps,
        )
    };
    if opts.parallel {
        (0..tiling.cell_count()).into_par_iter().map(one).collect()
    } else {
        (0..tiling.cell_count()).map(one).collect()
    }
}

impl GridForest {
    pub fn build(points: &[UnitPoint], opts: &BuildOptions) -> Result<Self> {
        check_points(points)?;
        check_options(opts)?;
        let params = GridParams::new(points.len(), opts.c1)?;
        if params.is_degenerate() {
            let single = CellStore::build(points, SemiOpenRect::UNIT, opts.variant, opts.eps)?;
            return Ok(Self {
                params,
                options: *opts,
                levels: Vec::new(),
                single: Some(single),
            });
        }
        let mut levels = Vec::with_capacity(params.level_count);
        for i in 0..params.level_count {
            let (cols, rows) = params.level_dims(i);
            let tiling = Tiling { cols, rows };
            levels.push(GridLevel {
                index: i,
                tiling,
                cells: build_cells(points, tiling, opts)?,
            });
        }
        Ok(Self {
            params,
            options: *opts,
            levels,
            single: None,
        })
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    pub fn variant(&self) -> Variant {
        self.options.variant
    }

    pub fn levels(&self) -> &[GridLevel] {
        &self.levels
    }

    /// Emptiness of `q`. May answer "nonempty" for an empty query of area
    /// above `w/N`; never answers "empty" for a nonempty one.
    #[inline]
    pub fn query_empty(&self, q: &SemiOpenRect) -> bool {
        let cq = match clamp_query(q) {
            Ok(Clamped::Rect(r)) => r,
            _ => return true,
        };
        if let Some(single) = &self.single {
            return single.is_empty(q);
        }
        if cq.area() > self.params.cell_area() {
            return false;
        }
        let level = &self.levels[self.params.level_for(cq.width())];
        let s = level.tiling.span(&cq);
        assert!(
            s.count() <= 6,
            "query {q:?} meets {} cells at level {}",
            s.count(),
            level.index
        );
        for r in s.r0..=s.r1 {
            for c in s.c0..=s.c1 {
                if !level.cells[r * level.tiling.cols + c].is_empty(q) {
                    return false;
                }
            }
        }
        true
    }

    /// [`GridForest::query_empty`] with probe accounting. A query meeting
    /// more than six cells is reported as an error instead of answered.
    pub fn query_empty_traced(&self, q: &SemiOpenRect, trace: &mut QueryTrace) -> Result<bool> {
        *trace = QueryTrace::default();
        let cq = match clamp_query(q) {
            Ok(Clamped::Rect(r)) => r,
            _ => {
                trace.outside = true;
                return Ok(true);
            }
        };
        let probe = |cell: &CellStore, trace: &mut QueryTrace| {
            let mut ct = CellTrace::default();
            let empty = cell.is_empty_traced(q, &mut ct);
            trace.cells_probed += 1;
            trace.crossing_probes += ct.crossing_probes;
            trace.quadrant_probes += ct.quadrant_probes;
            trace.point_tests += ct.point_tests;
            trace.max_cell_quadrant_probes = trace.max_cell_quadrant_probes.max(ct.quadrant_probes);
            empty
        };
        if let Some(single) = &self.single {
            trace.cells = 1;
            return Ok(probe(single, trace));
        }
        if cq.area() > self.params.cell_area() {
            trace.shortcut = true;
            return Ok(false);
        }
        let j = self.params.level_for(cq.width());
        let level = &self.levels[j];
        let ids = level.cells_overlapping(&cq)?;
        trace.level = Some(j);
        trace.cells = ids.len();
        for id in ids {
            if !probe(&level.cells[id], trace) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn heap_bytes(&self) -> usize {
        let cells: usize = self
            .levels
            .iter()
            .map(|l| {
                l.cells.capacity() * std::mem::size_of::<CellStore>()
                    + l.cells.iter().map(CellStore::heap_bytes).sum::<usize>()
            })
            .sum();
        cells + self.single.as_ref().map_or(0, CellStore::heap_bytes)
    }

    pub fn space_report(&self) -> SpaceReport {
        let mut acc = SpaceAccumulator::new(&self.params, self.options.variant);
        if let Some(single) = &self.single {
            acc.single(single.len());
        }
        for l in &self.levels {
            acc.level(l.index, l.tiling, l.cells.iter().map(CellStore::len));
        }
        acc.finish(self.heap_bytes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSpace {
    pub index: usize,
    pub cols: usize,
    pub rows: usize,
    pub empty_cells: usize,
    pub min_points: usize,
    pub max_points: usize,
    pub mean_points: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceReport {
    pub variant: Variant,
    pub params: GridParams,
    pub levels: Vec<LevelSpace>,
    /// Number of cells per point count, over all levels.
    pub cell_histogram: BTreeMap<usize, usize>,
    pub bytes: usize,
    pub bytes_per_point: f64,
}

struct SpaceAccumulator {
    params: GridParams,
    variant: Variant,
    levels: Vec<LevelSpace>,
    hist: BTreeMap<usize, usize>,
}

impl SpaceAccumulator {
    fn new(params: &GridParams, variant: Variant) -> Self {
        Self {
            params: *params,
            variant,
            levels: Vec::new(),
            hist: BTreeMap::new(),
        }
    }

    fn single(&mut self, len: usize) {
        *self.hist.entry(len).or_default() += 1;
    }

    fn level(&mut self, index: usize, tiling: Tiling, counts: impl Iterator<Item = usize>) {
        let counts: Vec<usize> = counts.collect();
        for &c in &counts {
            *self.hist.entry(c).or_default() += 1;
        }
        self.levels.push(LevelSpace {
            index,
            cols: tiling.cols,
            rows: tiling.rows,
            empty_cells: counts.iter().filter(|&&c| c == 0).count(),
            min_points: counts.iter().copied().min().unwrap_or(0),
            max_points: counts.iter().copied().max().unwrap_or(0),
            mean_points: counts.iter().sum::<usize>() as f64 / counts.len() as f64,
        });
    }

    fn finish(self, bytes: usize) -> SpaceReport {
        SpaceReport {
            variant: self.variant,
            params: self.params,
            levels: self.levels,
            cell_histogram: self.hist,
            bytes,
            bytes_per_point: bytes as f64 / self.params.n as f64,
        }
    }
}

/// Space of the structure [`GridForest::build`] would produce, measured by
/// building one cell at a time and dropping it, so peak memory stays at a
/// single cell.
pub fn survey_space(points: &[UnitPoint], opts: &BuildOptions) -> Result<SpaceReport> {
    check_points(points)?;
    check_options(opts)?;
    let params = GridParams::new(points.len(), opts.c1)?;
    let mut acc = SpaceAccumulator::new(&params, opts.variant);
    if params.is_degenerate() {
        let single = CellStore::build(points, SemiOpenRect::UNIT, opts.variant, opts.eps)?;
        acc.single(single.len());
        return Ok(acc.finish(single.heap_bytes()));
    }
    let mut bytes = 0;
    for i in 0..params.level_count {
        let (cols, rows) = params.level_dims(i);
        let tiling = Tiling { cols, rows };
        let (starts, sorted) = bucket(points, tiling);
        let measure = |c: usize| -> Result<usize> {
            let cell = CellStore::build(
                &sorted[starts[c]..starts[c + 1]],
                tiling.cell_rect(c),
                opts.variant,
                opts.eps,
            )?;
            Ok(cell.heap_bytes())
        };
        let cell_bytes: Vec<usize> = if opts.parallel {
            (0..tiling.cell_count())
                .into_par_iter()
                .map(measure)
                .collect::<Result<_>>()?
        } else {
            (0..tiling.cell_count()).map(measure).collect::<Result<_>>()?
        };
        bytes += cell_bytes.iter().sum::<usize>() + tiling.cell_count() * std::mem::size_of::<CellStore>();
        acc.level(i, tiling, starts.windows(2).map(|w| w[1] - w[0]));
    }
    Ok(acc.finish(bytes))
}
