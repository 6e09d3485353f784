//! Orthogonal range emptiness for points in the unit square.
//!
//! Constant-time rank queries for uniformly distributed reals, emptiness
//! structures in rank space, a three-level range tree, and two grid-based
//! compositions that answer emptiness queries in O(1) expected time with a
//! one-sided error on large queries.

// `!(a <= b)` is used on purpose so NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `is_empty` on the structures is the emptiness query, not a size check.
#![allow(clippy::len_without_is_empty)]

pub mod error;
pub mod geom;
pub mod gridded;
pub mod measure;
pub mod oracle;
pub mod pointfile;
pub mod rangetree;
pub mod rank;
pub mod rankspace;
pub mod workload;

pub use error::{Error, Result};
pub use geom::{clamp_query, sample_points, Clamped, RankPoint, RankRect, SemiOpenRect, UnitPoint};
pub use gridded::{BuildOptions, GridForest, GridParams, Variant};
pub use rangetree::RangeTree3;
pub use rank::{Interval, MultiRank, Rank1D};
pub use rankspace::{to_rank_space, CrossingStore, Orientation, Permutation, QuadrantStore, SlabTree};
pub use workload::WorkloadSpec;
