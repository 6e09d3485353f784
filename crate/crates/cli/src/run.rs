//! Building structures and replaying workloads against them.

use std::time::Instant;

use anyhow::{bail, Result};
use clap::ValueEnum;

use rectempty::geom::{clamp_query, Clamped};
use rectempty::gridded::QueryTrace;
use rectempty::measure::{measure_latency, Latency, BATCH};
use rectempty::oracle::{oracle_empty, oracle_empty_rank, oracle_quadrant_empty, RankOracle, SortedOracle};
use rectempty::rangetree::RangeProbes;
use rectempty::{
    to_rank_space, BuildOptions, GridForest, Interval, MultiRank, Orientation, Permutation, QuadrantStore, RangeTree3,
    Rank1D, RankRect, SemiOpenRect, SlabTree, UnitPoint, Variant, WorkloadSpec,
};

use crate::report::{bump, BenchRow, Mismatches, ProbeHistogram, RunReport};
use crate::{BuildArgs, Structure};

const EXHAUSTIVE_QUADRANT_MAX: usize = 1024;
const EXHAUSTIVE_SLAB_MAX: usize = 64;

enum Built {
    Rank1d(Rank1D),
    Quadrant {
        rank: MultiRank,
        perm: Permutation,
        store: QuadrantStore,
    },
    Slab {
        rank: MultiRank,
        perm: Permutation,
        tree: SlabTree,
    },
    Range(RangeTree3),
    Grid(GridForest),
    Oracle(Vec<UnitPoint>),
}

fn name(s: Structure) -> String {
    s.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn unit_ranks(pts: &[UnitPoint]) -> Result<MultiRank> {
    Ok(MultiRank::build_2d(pts, [Interval::UNIT, Interval::UNIT])?)
}

fn build(pts: &[UnitPoint], args: &BuildArgs) -> Result<Built> {
    let grid = |variant| {
        let opts = BuildOptions {
            variant,
            c1: args.c1,
            eps: args.eps,
            parallel: args.parallel_build,
        };
        Ok::<_, anyhow::Error>(Built::Grid(GridForest::build(pts, &opts)?))
    };
    Ok(match args.structure {
        Structure::Rank1d => {
            let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
            Built::Rank1d(Rank1D::build(&xs, Interval::UNIT)?)
        }
        Structure::Quadrant => {
            let perm = to_rank_space(pts);
            Built::Quadrant {
                rank: unit_ranks(pts)?,
                store: QuadrantStore::build(&perm),
                perm,
            }
        }
        Structure::Slabtree => {
            let perm = to_rank_space(pts);
            Built::Slab {
                rank: unit_ranks(pts)?,
                tree: SlabTree::build(&perm, args.eps)?,
                perm,
            }
        }
        Structure::Rangetree => Built::Range(RangeTree3::build(pts, SemiOpenRect::UNIT)?),
        Structure::Main1 => grid(Variant::Main1)?,
        Structure::Main2 => grid(Variant::Main2)?,
        Structure::Oracle => Built::Oracle(pts.to_vec()),
    })
}

fn high_x(o: Orientation) -> bool {
    matches!(o, Orientation::HighXLowY | Orientation::HighXHighY)
}

fn high_y(o: Orientation) -> bool {
    matches!(o, Orientation::LowXHighY | Orientation::HighXHighY)
}

/// Rank-space corner of `q` for a quadrant of orientation `o`.
fn corner(rank: &MultiRank, q: &SemiOpenRect, o: Orientation) -> (usize, usize) {
    let x = if high_x(o) { q.x_lo } else { q.x_hi };
    let y = if high_y(o) { q.y_lo } else { q.y_hi };
    rank.query2(x, y)
}

impl Built {
    fn heap_bytes(&self) -> usize {
        match self {
            Built::Rank1d(r) => r.heap_bytes(),
            Built::Quadrant { rank, store, .. } => rank.heap_bytes() + 4 * store.len() * std::mem::size_of::<u32>(),
            Built::Slab { rank, tree, .. } => rank.heap_bytes() + tree.heap_bytes(),
            Built::Range(t) => t.heap_bytes(),
            Built::Grid(f) => f.heap_bytes(),
            Built::Oracle(p) => std::mem::size_of_val(p.as_slice()),
        }
    }

    /// The structure's answer for `q`, used for latency measurement. Rank
    /// structures answer "is the x-range of `q` empty", quadrant stores the
    /// low-low quadrant at the upper corner of `q`.
    #[inline]
    fn answer(&self, q: &SemiOpenRect) -> bool {
        match self {
            Built::Rank1d(r) => r.rank(q.x_lo) == r.rank(q.x_hi),
            Built::Quadrant { rank, store, .. } => {
                let (i, j) = rank.query2(q.x_hi, q.y_hi);
                store.is_empty(Orientation::LowXLowY, i, j)
            }
            Built::Slab { rank, tree, .. } => tree.is_empty(&rank.translate(q)),
            Built::Range(t) => t.is_empty(q),
            Built::Grid(f) => f.query_empty(q),
            Built::Oracle(p) => oracle_empty(p, q),
        }
    }
}

fn latency(built: &Built, queries: &[SemiOpenRect]) -> Option<Latency> {
    (!queries.is_empty()).then(|| measure_latency(queries, BATCH, 10, |q| built.answer(q)))
}

struct Tally {
    checked: usize,
    mismatches: Mismatches,
    hist: ProbeHistogram,
}

impl Tally {
    fn new() -> Self {
        Self {
            checked: 0,
            mismatches: Mismatches::default(),
            hist: ProbeHistogram::default(),
        }
    }

    fn exact(&mut self, got: bool, want: bool) {
        self.checked += 1;
        if got != want {
            self.mismatches.other += 1;
        }
    }
}

fn check_rank(r: &Rank1D, pts: &[UnitPoint], queries: &[SemiOpenRect], exhaustive: bool, t: &mut Tally) {
    let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
    let oracle = RankOracle::new(&xs);
    let mut probe = |x: f64| {
        t.checked += 1;
        if r.rank(x) != oracle.rank(x) {
            t.mismatches.other += 1;
        }
    };
    if exhaustive {
        for &v in &xs {
            probe(v);
            for bits in [v.to_bits().checked_sub(1), v.to_bits().checked_add(1)]
                .into_iter()
                .flatten()
            {
                probe(f64::from_bits(bits));
            }
        }
    } else {
        for q in queries {
            for x in [q.x_lo, q.x_hi, q.y_lo, q.y_hi] {
                probe(x);
            }
        }
    }
}

fn check_quadrant(
    rank: &MultiRank,
    perm: &Permutation,
    store: &QuadrantStore,
    queries: &[SemiOpenRect],
    exhaustive: bool,
    t: &mut Tally,
) {
    let n = perm.len();
    if exhaustive {
        for o in Orientation::ALL {
            for i in 0..=n {
                for j in 0..=n {
                    t.exact(store.is_empty(o, i, j), oracle_quadrant_empty(perm, o, i, j));
                }
            }
        }
    } else {
        for q in queries {
            for o in Orientation::ALL {
                let (i, j) = corner(rank, q, o);
                t.exact(store.is_empty(o, i, j), oracle_quadrant_empty(perm, o, i, j));
            }
        }
    }
}

fn check_slab(
    rank: &MultiRank,
    perm: &Permutation,
    tree: &SlabTree,
    oracle: &SortedOracle,
    queries: &[SemiOpenRect],
    exhaustive: bool,
    t: &mut Tally,
) {
    let n = perm.len();
    if exhaustive {
        for i1 in 0..=n {
            for i2 in i1..=n {
                for j1 in 0..=n {
                    for j2 in j1..=n {
                        let r = RankRect { i1, i2, j1, j2 };
                        let mut probes = 0;
                        t.exact(tree.is_empty_counted(&r, &mut probes), oracle_empty_rank(perm, &r));
                        bump(&mut t.hist.crossing_probes, probes);
                    }
                }
            }
        }
    } else {
        for q in queries {
            let mut probes = 0;
            t.exact(tree.is_empty_counted(&rank.translate(q), &mut probes), oracle.empty(q));
            bump(&mut t.hist.crossing_probes, probes);
        }
    }
}

fn check_range(tree: &RangeTree3, oracle: &SortedOracle, queries: &[SemiOpenRect], t: &mut Tally) {
    for q in queries {
        let mut probes = RangeProbes::default();
        t.exact(tree.is_empty_traced(q, &mut probes), oracle.empty(q));
        bump(&mut t.hist.quadrant_probes, probes.quadrant_probes);
        bump(&mut t.hist.point_tests, probes.point_tests);
    }
}

fn check_grid(f: &GridForest, oracle: &SortedOracle, queries: &[SemiOpenRect], t: &mut Tally) -> Result<()> {
    let threshold = f.params().cell_area();
    let mut trace = QueryTrace::default();
    for q in queries {
        let got = f.query_empty_traced(q, &mut trace)?;
        let want = oracle.empty(q);
        t.checked += 1;
        if got != want {
            let area = match clamp_query(q)? {
                Clamped::Rect(r) => r.area(),
                Clamped::Empty => 0.0,
            };
            if !got && area > threshold {
                t.mismatches.one_sided += 1;
            } else {
                t.mismatches.other += 1;
            }
        }
        if trace.level.is_some() || trace.cells > 0 {
            bump(&mut t.hist.cells, trace.cells);
            bump(&mut t.hist.quadrant_probes, trace.quadrant_probes);
            bump(&mut t.hist.crossing_probes, trace.crossing_probes);
        }
    }
    Ok(())
}

pub fn verify(
    pts: &[UnitPoint],
    seed: u64,
    args: &BuildArgs,
    spec: &WorkloadSpec,
    exhaustive: bool,
) -> Result<RunReport> {
    let n = pts.len();
    match args.structure {
        Structure::Oracle => bail!("--structure oracle is only available for bench"),
        Structure::Quadrant if exhaustive && n > EXHAUSTIVE_QUADRANT_MAX => {
            bail!("--exhaustive quadrant supports n <= {EXHAUSTIVE_QUADRANT_MAX}")
        }
        Structure::Slabtree if exhaustive && n > EXHAUSTIVE_SLAB_MAX => {
            bail!("--exhaustive slabtree supports n <= {EXHAUSTIVE_SLAB_MAX}")
        }
        Structure::Rangetree | Structure::Main1 | Structure::Main2 if exhaustive => {
            bail!("--exhaustive is not supported for {}", name(args.structure))
        }
        _ => {}
    }
    let queries = spec.generate()?;
    let start = Instant::now();
    let built = build(pts, args)?;
    let build_ns = start.elapsed().as_nanos();

    let oracle = SortedOracle::new(pts);
    let mut t = Tally::new();
    match &built {
        Built::Rank1d(r) => check_rank(r, pts, &queries, exhaustive, &mut t),
        Built::Quadrant { rank, perm, store } => check_quadrant(rank, perm, store, &queries, exhaustive, &mut t),
        Built::Slab { rank, perm, tree } => check_slab(rank, perm, tree, &oracle, &queries, exhaustive, &mut t),
        Built::Range(tree) => check_range(tree, &oracle, &queries, &mut t),
        Built::Grid(f) => check_grid(f, &oracle, &queries, &mut t)?,
        Built::Oracle(_) => unreachable!(),
    }
    let space = match &built {
        Built::Grid(f) => Some(f.space_report()),
        _ => None,
    };
    Ok(RunReport {
        structure: name(args.structure),
        n,
        seed,
        exhaustive,
        queries: t.checked,
        build_ns,
        bytes_estimate: built.heap_bytes(),
        latency: latency(&built, &queries),
        mismatches: t.mismatches,
        one_sided_rate: if t.checked == 0 {
            0.0
        } else {
            t.mismatches.one_sided as f64 / t.checked as f64
        },
        probe_histogram: t.hist,
        space,
    })
}

pub fn bench(pts: &[UnitPoint], args: &BuildArgs, spec: &WorkloadSpec) -> Result<BenchRow> {
    let queries = spec.generate()?;
    let start = Instant::now();
    let built = build(pts, args)?;
    let build_ns = start.elapsed().as_nanos();
    let lat = latency(&built, &queries).unwrap_or_default();
    let bytes = built.heap_bytes();
    Ok(BenchRow {
        structure: name(args.structure),
        n: pts.len(),
        build_ns,
        bytes_estimate: bytes,
        bytes_per_point: bytes as f64 / pts.len() as f64,
        p50_ns: lat.p50_ns,
        p99_ns: lat.p99_ns,
        mean_ns: lat.mean_ns,
    })
}
