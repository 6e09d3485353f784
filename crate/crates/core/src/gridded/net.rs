use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{GridParams, Tiling};
use crate::error::{invalid, Result};
use crate::geom::UnitPoint;
use crate::oracle::SortedOracle;
use crate::workload::rect_with_area;

/// Point count of every cell, level by level.
pub fn cell_counts(params: &GridParams, points: &[UnitPoint]) -> Vec<Vec<usize>> {
    (0..params.level_count)
        .map(|i| {
            let (cols, rows) = params.level_dims(i);
            let tiling = Tiling { cols, rows };
            let mut counts = vec![0; tiling.cell_count()];
            for &p in points {
                counts[tiling.cell_of(p)] += 1;
            }
            counts
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetReport {
    pub n: usize,
    pub c: f64,
    /// `c * log2(n) / n`, capped at 1.
    pub threshold_area: f64,
    pub trials: usize,
    pub empty_rectangles: usize,
    pub levels: usize,
    pub cells: usize,
    pub empty_cells: usize,
}

impl NetReport {
    pub fn violations(&self) -> usize {
        self.empty_rectangles + self.empty_cells
    }
}

/// Checks the net property: random rectangles of area at least
/// `c * log2(n) / n` contain a point, and so does every grid cell built
/// with `c1 = c`.
pub fn validate_net(points: &[UnitPoint], c: f64, trials: usize, seed: u64) -> Result<NetReport> {
    if !(c > 16.0 && c.is_finite()) {
        return Err(invalid(format!("c must be a finite value > 16, got {c}")));
    }
    let n = points.len();
    let params = GridParams::new(n, c)?;
    let threshold_area = (c * (n as f64).log2() / n as f64).min(1.0);
    let oracle = SortedOracle::new(points);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut empty_rectangles = 0;
    for _ in 0..trials {
        let area = threshold_area * 2f64.powf(rng.gen::<f64>()).min(1.0 / threshold_area);
        let r = rect_with_area(&mut rng, area, (0.1, 10.0));
        if oracle.empty(&r) {
            empty_rectangles += 1;
        }
    }
    let counts = cell_counts(&params, points);
    Ok(NetReport {
        n,
        c,
        threshold_area,
        trials,
        empty_rectangles,
        levels: counts.len(),
        cells: counts.iter().map(Vec::len).sum(),
        empty_cells: counts.iter().flatten().filter(|&&k| k == 0).count(),
    })
}
