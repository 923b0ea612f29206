//! Succinct greedy graph embeddings.
//!
//! The pipeline takes a connected graph, picks a spanning tree, splits it into
//! heavy paths, and places every vertex at a pair of nodes `(x, y)` of the
//! infinite binary tree. Those pairs are `O(log n)`-bit coordinates in the
//! dyadic tree metric; [`hyperbolic`] realizes them as points of the
//! hyperbolic plane where greedy forwarding always makes progress.
//!
//! ```
//! use sgh_core::{embed::{embed, EmbedOptions}, graph::parse_graph};
//!
//! let g = parse_graph("4 3\n0 1\n1 2\n2 3\n").unwrap();
//! let emb = embed(&g, &EmbedOptions::default()).unwrap();
//! assert_eq!(emb.table.point(1).to_string(), "(ε, 100)");
//! ```

pub mod balanced;
pub mod codec;
pub mod decomposition;
pub mod dyadic;
pub mod embed;
pub mod error;
pub mod families;
pub mod graph;
pub mod hyperbolic;
pub mod router;

pub use error::{Error, Result};

/// Which child of its parent a node of the infinite binary tree is. The root
/// has no parent and takes the right-child conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Root,
    Left,
    Right,
}

impl Side {
    /// Side of a node reached from its parent by `bit` (`true` = right).
    pub fn from_bit(bit: bool) -> Side {
        if bit {
            Side::Right
        } else {
            Side::Left
        }
    }

    /// Root and right children share the same orientation rules.
    pub fn is_right_like(self) -> bool {
        !matches!(self, Side::Left)
    }
}
