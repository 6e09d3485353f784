//! LCA in a complete binary tree laid out in heap order: root 1, children of
//! `v` are `2v` and `2v+1`, leaf `a` (1-based) of a `size`-leaf tree is
//! node `size + a - 1`.

use crate::error::{invalid, Result};

/// Deepest node whose leaf span contains leaves `a..=b`. No tables: the
/// number of levels to climb is the bit length of `(a-1) xor (b-1)`.
#[inline]
pub(crate) fn lca(size: usize, a: usize, b: usize) -> usize {
    let diff = (a - 1) ^ (b - 1);
    let climb = usize::BITS - diff.leading_zeros();
    (size + a - 1) >> climb
}

/// Checked form of the leaf-range LCA; `size` must be a power of two and
/// `1 <= a <= b <= size`.
pub fn lca_leafrange(size: usize, a: usize, b: usize) -> Result<usize> {
    if !size.is_power_of_two() {
        return Err(invalid(format!("tree size {size} is not a power of two")));
    }
    if a == 0 || a > b || b > size {
        return Err(invalid(format!("bad leaf range [{a}, {b}] for {size} leaves")));
    }
    Ok(lca(size, a, b))
}

/// First and last leaf (1-based) under heap node `node`.
pub fn leaf_span(size: usize, node: usize) -> (usize, usize) {
    let depth = usize::BITS - 1 - node.leading_zeros();
    let height = size.trailing_zeros() - depth;
    let first = (node << height) - size + 1;
    (first, first + (1 << height) - 1)
}
