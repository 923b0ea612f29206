//! Greedy embedding of a graph into the dyadic tree metric space.
//!
//! Every heavy path of the spanning tree is placed at one node of the
//! infinite binary tree; its child paths sit below it at the leaf positions
//! of an autocratic two-level weight-balanced tree. A vertex `v` gets
//! `x(v)` = the node of its heavy path and `y(v)` = the lowest common
//! ancestor of the nodes of its light children (`y = x` for leaves).

use std::fmt;

use crate::balanced::build_two_level;
use crate::decomposition::{build_compressed_tree, decompose, insert_dummies, CompressedTree, HeavyPathDecomposition};
use crate::dyadic::{DyadicPoint, TreeAddress};
use crate::error::{Error, Result};
use crate::graph::{build_spanning_tree, Graph, RootedTree, SpanningStrategy};
use crate::Side;

/// Coordinates of the real vertices, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingTable {
    points: Vec<DyadicPoint>,
}

impl EmbeddingTable {
    pub fn new(points: Vec<DyadicPoint>) -> EmbeddingTable {
        EmbeddingTable { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, v: usize) -> &DyadicPoint {
        &self.points[v]
    }

    pub fn points(&self) -> &[DyadicPoint] {
        &self.points
    }

    /// Deepest `y` address; `x` is never deeper than `y`.
    pub fn max_address_depth(&self) -> usize {
        self.points.iter().map(|p| p.y().len()).max().unwrap_or(0)
    }

    pub fn coordinate_bits(&self) -> CoordinateBits {
        let per_vertex: Vec<usize> = self.points.iter().map(|p| p.y().len()).collect();
        let max = per_vertex.iter().copied().max().unwrap_or(0);
        CoordinateBits { per_vertex, max }
    }
}

impl fmt::Display for EmbeddingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, p) in self.points.iter().enumerate() {
            writeln!(f, "{v}: {p}")?;
        }
        Ok(())
    }
}

/// Payload size of each coordinate: the bits of `y` (the `x` prefix is
/// implied by its length).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateBits {
    pub per_vertex: Vec<usize>,
    pub max: usize,
}

pub fn coordinate_bits(table: &EmbeddingTable) -> CoordinateBits {
    table.coordinate_bits()
}

/// Binary-tree node of every super node, and the side it hangs on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperNodePlacement {
    pub addresses: Vec<TreeAddress>,
    pub sides: Vec<Side>,
}

/// Places the compressed tree into the infinite binary tree, root at `ε`.
///
/// Group order under a super node follows the heavy path apex-to-tail when
/// the super node is a right child (or the root) and tail-to-apex when it is
/// a left child; the side is the last bit of its address. A super node with a
/// single child still pushes that child one level down, so distinct heavy
/// paths never share a node.
pub fn place_super_nodes(t: &RootedTree, d: &HeavyPathDecomposition, z: &CompressedTree) -> Result<SuperNodePlacement> {
    let mut addresses = vec![TreeAddress::root(); z.len()];
    let mut sides = vec![Side::Root; z.len()];
    let mut placed = vec![false; z.len()];
    placed[z.root()] = true;
    let mut stack = vec![z.root()];
    while let Some(s) = stack.pop() {
        let mut groups: Vec<_> = z.groups(s).iter().collect();
        if groups.is_empty() {
            continue;
        }
        if !sides[s].is_right_like() {
            groups.reverse();
        }
        let weights: Vec<Vec<u64>> = groups
            .iter()
            .map(|g| g.members.iter().map(|&m| t.subtree_size(d.apex(m)) as u64).collect())
            .collect();
        let placement = build_two_level(&weights)?;
        let lone_child = weights.len() == 1 && weights[0].len() == 1;
        for (g, group) in groups.iter().enumerate() {
            for (i, &child) in group.members.iter().enumerate() {
                let mut suffix = placement.members[g][i].clone();
                if lone_child {
                    suffix.push(false);
                }
                let address = addresses[s].concat(&suffix);
                sides[child] = Side::from_bit(address.last_bit().expect("child below its parent"));
                addresses[child] = address;
                placed[child] = true;
                stack.push(child);
            }
        }
    }
    if let Some(s) = placed.iter().position(|p| !p) {
        return Err(Error::InternalInvariant(format!("super node {s} is unreachable from the root")));
    }
    Ok(SuperNodePlacement { addresses, sides })
}

/// Dyadic points of the real vertices of `t`.
pub fn assign_coordinates(
    t: &RootedTree,
    d: &HeavyPathDecomposition,
    placement: &SuperNodePlacement,
) -> Result<EmbeddingTable> {
    let mut points = Vec::with_capacity(t.real_count());
    for v in (0..t.len()).filter(|&v| !t.is_dummy(v)) {
        let x = placement.addresses[d.path_of(v)].clone();
        let y = d
            .light_children(t, v)
            .map(|c| &placement.addresses[d.path_of(c)])
            .fold(None::<TreeAddress>, |acc, a| Some(acc.map_or_else(|| a.clone(), |l| l.lca(a))));
        let y = match y {
            Some(y) => y,
            None if d.path(d.path_of(v)).len() > 1 => {
                return Err(Error::InternalInvariant(format!(
                    "vertex {v} lies on a nontrivial heavy path but has no light children"
                )))
            }
            None => x.clone(),
        };
        let point = DyadicPoint::new(x, y)
            .ok_or_else(|| Error::InternalInvariant(format!("x({v}) is not an ancestor of y({v})")))?;
        points.push(point);
    }
    Ok(EmbeddingTable { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmbedOptions {
    pub root: usize,
    pub strategy: SpanningStrategy,
}

/// Every intermediate structure of one embedding run.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// Spanning tree after dummy insertion.
    pub tree: RootedTree,
    pub decomposition: HeavyPathDecomposition,
    pub compressed: CompressedTree,
    pub placement: SuperNodePlacement,
    pub table: EmbeddingTable,
}

impl Embedding {
    pub fn dummy_count(&self) -> usize {
        self.tree.dummy_count()
    }

    /// Spanning-tree edges between real vertices, as `(child, parent)`.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        self.tree.edges().filter(|&(c, _)| !self.tree.is_dummy(c)).collect()
    }
}

/// Embeds a rooted tree.
pub fn embed_tree(t: &RootedTree) -> Result<Embedding> {
    let plain = decompose(t);
    let (tree, decomposition) = insert_dummies(t, &plain);
    let compressed = build_compressed_tree(&tree, &decomposition)?;
    let placement = place_super_nodes(&tree, &decomposition, &compressed)?;
    let table = assign_coordinates(&tree, &decomposition, &placement)?;
    Ok(Embedding { tree, decomposition, compressed, placement, table })
}

/// Spanning tree, decomposition, placement and coordinates for `g`.
pub fn embed(g: &Graph, options: &EmbedOptions) -> Result<Embedding> {
    let t = build_spanning_tree(g, options.root, options.strategy)?;
    embed_tree(&t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn a(s: &str) -> TreeAddress {
        s.parse().unwrap()
    }

    fn pt(x: &str, y: &str) -> DyadicPoint {
        DyadicPoint::new(a(x), a(y)).unwrap()
    }

    fn run(text: &str) -> Embedding {
        embed(&parse_graph(text).unwrap(), &EmbedOptions::default()).unwrap()
    }

    #[test]
    fn path_of_four() {
        let e = run("4 3\n0 1\n1 2\n2 3\n");
        // super nodes: [0,1,2], [3], D0, D1
        assert_eq!(e.placement.addresses, vec![a(""), a("111"), a("0"), a("100")]);
        assert_eq!(
            e.table.points(),
            &[pt("", "0"), pt("", "100"), pt("", "111"), pt("111", "111")]
        );
        assert_eq!(e.table.coordinate_bits().max, 3);
        assert_eq!(e.dummy_count(), 2);
        assert_eq!(e.tree_edges(), vec![(1, 0), (2, 1), (3, 2)]);
    }

    #[test]
    fn star() {
        let e = run("4 3\n0 1\n0 2\n0 3\n");
        assert_eq!(e.placement.addresses, vec![a(""), a("0"), a("100"), a("111")]);
        assert_eq!(
            e.table.points(),
            &[pt("", ""), pt("0", "0"), pt("100", "100"), pt("111", "111")]
        );
    }

    #[test]
    fn single_vertex() {
        let e = run("1 0\n");
        assert_eq!(e.table.points(), &[pt("", "")]);
        assert_eq!(e.table.coordinate_bits().max, 0);
    }

    #[test]
    fn lone_child_moves_down() {
        let e = run("2 1\n0 1\n");
        assert_eq!(e.table.points(), &[pt("", "0"), pt("0", "0")]);
        assert_eq!(e.placement.sides, vec![Side::Root, Side::Left]);
    }

    #[test]
    fn group_order_follows_the_side() {
        let mut seen = [false; 2];
        for seed in 0..6 {
            let g = crate::families::random_tree(60, seed);
            let e = embed(&g, &EmbedOptions::default()).unwrap();
            for (k, path) in e.decomposition.paths().iter().enumerate() {
                let real: Vec<usize> = path.iter().copied().filter(|&v| !e.tree.is_dummy(v)).collect();
                if path.len() < 2 || real.len() < 2 {
                    continue;
                }
                let ys: Vec<&TreeAddress> = real.iter().map(|&v| e.table.point(v).y()).collect();
                let right_like = e.placement.sides[k].is_right_like();
                seen[right_like as usize] = true;
                for w in ys.windows(2) {
                    // right-like: apex leftmost; left: apex rightmost
                    assert_eq!(w[0] < w[1], right_like, "path {k}");
                }
            }
        }
        assert_eq!(seen, [true, true]);
    }
}
