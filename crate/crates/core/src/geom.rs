//! Points, semi-open rectangles and the seeded point sampler.
//!
//! Every rectangle in this crate is semi-open: `(x_lo, x_hi] × (y_lo, y_hi]`.
//! A point on a lower edge is outside, a point on an upper edge is inside.
//! The same convention holds in rank space, where `(i1, i2] × (j1, j2]`
//! selects the points whose x-rank lies in `i1+1..=i2` and y-rank in
//! `j1+1..=j2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPoint {
    pub x: f64,
    pub y: f64,
}

impl UnitPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn in_unit_square(&self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiOpenRect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl SemiOpenRect {
    /// Builds `(x_lo, x_hi] × (y_lo, y_hi]`, rejecting reversed or NaN bounds.
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(x_lo <= x_hi) || !(y_lo <= y_hi) {
            return Err(invalid(format!(
                "reversed rectangle ({x_lo}, {x_hi}] x ({y_lo}, {y_hi}]"
            )));
        }
        Ok(Self { x_lo, x_hi, y_lo, y_hi })
    }

    pub const UNIT: SemiOpenRect = SemiOpenRect {
        x_lo: 0.0,
        x_hi: 1.0,
        y_lo: 0.0,
        y_hi: 1.0,
    };

    #[inline]
    pub fn contains(&self, p: UnitPoint) -> bool {
        self.x_lo < p.x && p.x <= self.x_hi && self.y_lo < p.y && p.y <= self.y_hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// True when no real point can satisfy the membership test.
    pub fn is_degenerate(&self) -> bool {
        !(self.x_lo < self.x_hi && self.y_lo < self.y_hi)
    }
}

/// Free-function form of [`SemiOpenRect::contains`].
pub fn rect_contains(r: &SemiOpenRect, p: UnitPoint) -> bool {
    r.contains(p)
}

/// Result of intersecting a query with the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Clamped {
    /// No point of `[0,1]²` can lie in the query.
    Empty,
    /// The query's extent inside the unit square.
    Rect(SemiOpenRect),
}

impl Clamped {
    pub fn is_empty(&self) -> bool {
        matches!(self, Clamped::Empty)
    }

    pub fn rect(&self) -> Option<SemiOpenRect> {
        match self {
            Clamped::Empty => None,
            Clamped::Rect(r) => Some(*r),
        }
    }
}

/// Intersects `r` with `[0,1]²`.
///
/// The returned rectangle is the geometric extent used for area and cell
/// routing. `Empty` is returned only when no point of the closed unit square
/// can satisfy the semi-open membership test of `r`, so a point sitting on
/// `x = 0` still counts for `(-1, 0] × …` even though the clamped extent
/// has zero width.
pub fn clamp_query(r: &SemiOpenRect) -> Result<Clamped> {
    if !(r.x_lo <= r.x_hi) || !(r.y_lo <= r.y_hi) {
        return Err(invalid(format!("reversed rectangle {r:?}")));
    }
    let outside =
        r.x_hi < 0.0 || r.x_lo >= 1.0 || r.y_hi < 0.0 || r.y_lo >= 1.0 || r.x_lo == r.x_hi || r.y_lo == r.y_hi;
    if outside {
        return Ok(Clamped::Empty);
    }
    Ok(Clamped::Rect(SemiOpenRect {
        x_lo: r.x_lo.max(0.0),
        x_hi: r.x_hi.min(1.0),
        y_lo: r.y_lo.max(0.0),
        y_hi: r.y_hi.min(1.0),
    }))
}

/// Integral rectangle `(i1, i2] × (j1, j2]` over rank coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankRect {
    pub i1: usize,
    pub i2: usize,
    pub j1: usize,
    pub j2: usize,
}

impl RankRect {
    pub fn new(i1: usize, i2: usize, j1: usize, j2: usize) -> Result<Self> {
        if i1 > i2 || j1 > j2 {
            return Err(invalid(format!("reversed rank rectangle ({i1},{i2}]x({j1},{j2}]")));
        }
        Ok(Self { i1, i2, j1, j2 })
    }

    #[inline]
    pub fn contains(&self, p: RankPoint) -> bool {
        self.i1 < p.i && p.i <= self.i2 && self.j1 < p.j && p.j <= self.j2
    }
}

/// A point in rank space; coordinates are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RankPoint {
    pub i: usize,
    pub j: usize,
}

/// Draws `n` points uniformly from the unit square.
///
/// The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`;
/// each point consumes two `f64` draws, x first, each uniform on `[0, 1)`.
pub fn sample_points(n: usize, seed: u64) -> Result<Vec<UnitPoint>> {
    if n == 0 {
        return Err(invalid("sample_points needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            UnitPoint { x, y }
        })
        .collect())
}

/// Uniform reals on `[0, 1)` from the same generator as [`sample_points`].
pub fn sample_values(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>()).collect()
}
