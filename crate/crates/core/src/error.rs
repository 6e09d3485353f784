use thiserror::Error;

use crate::geom::RankRect;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A crossing store was probed with a query that does not span its slab range.
    #[error("query {query:?} does not cross slab range [{alpha}, {beta}]")]
    NotCrossing { query: RankRect, alpha: usize, beta: usize },

    /// More than six grid cells were selected for a small query.
    #[error("query overlaps {count} cells at level {level}, at most 6 allowed")]
    TooManyCells { level: usize, count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
