use serde::{Deserialize, Serialize};

use super::Permutation;

/// Which two sides of a quadrant query are bounded by the query corner.
///
/// `LowXLowY` answers `(0, i] × (0, j]`, `HighXHighY` answers
/// `(i, n] × (j, n]`, and the mixed ones combine the two forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    LowXLowY,
    LowXHighY,
    HighXLowY,
    HighXHighY,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::LowXLowY,
        Orientation::LowXHighY,
        Orientation::HighXLowY,
        Orientation::HighXHighY,
    ];

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    fn low_x(self) -> bool {
        matches!(self, Orientation::LowXLowY | Orientation::LowXHighY)
    }

    fn low_y(self) -> bool {
        matches!(self, Orientation::LowXLowY | Orientation::HighXLowY)
    }
}

/// Fills `out` (length n) with the staircase of `ys` for `o`.
///
/// Low-x staircases are prefix extremes, `out[i-1]` over x in `1..=i`;
/// high-x staircases are suffix extremes, `out[i]` over x in `i+1..=n`.
/// Low-y keeps minima, high-y keeps maxima.
pub(crate) fn fill_staircase(
    ys: impl DoubleEndedIterator<Item = u32> + ExactSizeIterator,
    o: Orientation,
    out: &mut [u32],
) {
    let pick = |acc: u32, y: u32| if o.low_y() { acc.min(y) } else { acc.max(y) };
    let init = if o.low_y() { u32::MAX } else { 0 };
    if o.low_x() {
        let mut acc = init;
        for (slot, y) in out.iter_mut().zip(ys) {
            acc = pick(acc, y);
            *slot = acc;
        }
    } else {
        let mut acc = init;
        for (slot, y) in out.iter_mut().rev().zip(ys.rev()) {
            acc = pick(acc, y);
            *slot = acc;
        }
    }
}

/// Quadrant test against a staircase of length n; `i, j` in `0..=n`.
#[inline]
pub(crate) fn staircase_nonempty(o: Orientation, f: &[u32], i: usize, j: usize) -> bool {
    let n = f.len();
    match o {
        Orientation::LowXLowY => i >= 1 && (f[i.min(n) - 1] as usize) <= j,
        Orientation::LowXHighY => i >= 1 && (f[i.min(n) - 1] as usize) > j,
        Orientation::HighXLowY => i < n && (f[i] as usize) <= j,
        Orientation::HighXHighY => i < n && (f[i] as usize) > j,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staircase {
    pub orientation: Orientation,
    f: Vec<u32>,
}

impl Staircase {
    pub fn build(perm: &Permutation, orientation: Orientation) -> Self {
        let mut f = vec![0; perm.len()];
        fill_staircase(perm.ys().iter().copied(), orientation, &mut f);
        Self { orientation, f }
    }

    pub fn values(&self) -> &[u32] {
        &self.f
    }

    pub fn is_nonempty(&self, i: usize, j: usize) -> bool {
        staircase_nonempty(self.orientation, &self.f, i, j)
    }
}

/// Four staircases over one rank-space permutation: O(1) emptiness for any
/// quadrant anchored at a corner of `[0, n]²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrantStore {
    n: usize,
    stairs: [Staircase; 4],
}

impl QuadrantStore {
    pub fn build(perm: &Permutation) -> Self {
        Self {
            n: perm.len(),
            stairs: Orientation::ALL.map(|o| Staircase::build(perm, o)),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty_set(&self) -> bool {
        self.n == 0
    }

    pub fn staircase(&self, o: Orientation) -> &Staircase {
        &self.stairs[o.index()]
    }

    /// Emptiness of the `o` quadrant with corner `(i, j)`, e.g. `(0,i]×(0,j]`
    /// for `LowXLowY`.
    #[inline]
    pub fn is_empty(&self, o: Orientation, i: usize, j: usize) -> bool {
        !self.stairs[o.index()].is_nonempty(i.min(self.n), j.min(self.n))
    }
}
