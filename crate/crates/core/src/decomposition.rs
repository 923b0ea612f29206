//! Heavy-path decomposition and the compressed tree of heavy paths.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::RootedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Heavy,
    Light,
}

/// Label of each child-to-parent edge, indexed by the child (`None` at the
/// root). An edge `(v, w)` is heavy when `n(v) > n(w) / 2`.
pub fn classify_edges(t: &RootedTree) -> Vec<Option<EdgeKind>> {
    (0..t.len())
        .map(|v| {
            t.parent(v).map(|w| {
                if 2 * t.subtree_size(v) > t.subtree_size(w) {
                    EdgeKind::Heavy
                } else {
                    EdgeKind::Light
                }
            })
        })
        .collect()
}

/// Tree vertices partitioned into heavy paths, each listed apex first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyPathDecomposition {
    path_of: Vec<usize>,
    paths: Vec<Vec<usize>>,
}

impl HeavyPathDecomposition {
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn path(&self, k: usize) -> &[usize] {
        &self.paths[k]
    }

    pub fn apex(&self, k: usize) -> usize {
        self.paths[k][0]
    }

    pub fn path_of(&self, v: usize) -> usize {
        self.path_of[v]
    }

    /// The next vertex down `v`'s heavy path, if any.
    pub fn heavy_child(&self, v: usize) -> Option<usize> {
        let path = &self.paths[self.path_of[v]];
        let pos = path.iter().position(|&u| u == v)?;
        path.get(pos + 1).copied()
    }

    pub fn is_light_child(&self, t: &RootedTree, c: usize) -> bool {
        t.parent(c).is_some_and(|p| self.path_of[p] != self.path_of[c])
    }

    /// Children of `v` that start paths of their own, in child order.
    pub fn light_children<'a>(&'a self, t: &'a RootedTree, v: usize) -> impl Iterator<Item = usize> + 'a {
        t.children(v).iter().copied().filter(move |&c| self.path_of[c] != self.path_of[v])
    }
}

/// Maximal chains of heavy edges. Paths are numbered in preorder of their
/// apexes.
pub fn decompose(t: &RootedTree) -> HeavyPathDecomposition {
    let kinds = classify_edges(t);
    let heavy_child: Vec<Option<usize>> = (0..t.len())
        .map(|v| t.children(v).iter().copied().find(|&c| kinds[c] == Some(EdgeKind::Heavy)))
        .collect();
    let mut path_of = vec![usize::MAX; t.len()];
    let mut paths = Vec::new();
    for v in t.preorder() {
        if path_of[v] != usize::MAX {
            continue;
        }
        let k = paths.len();
        let mut path = vec![v];
        path_of[v] = k;
        let mut cur = v;
        while let Some(h) = heavy_child[cur] {
            path_of[h] = k;
            path.push(h);
            cur = h;
        }
        paths.push(path);
    }
    HeavyPathDecomposition { path_of, paths }
}

/// Gives every vertex of a nontrivial heavy path at least one light child by
/// appending dummy leaves. Each dummy forms its own singleton path. Sizes are
/// recomputed over the augmented tree; heavy/light labels are kept from the
/// original decomposition.
pub fn insert_dummies(t: &RootedTree, d: &HeavyPathDecomposition) -> (RootedTree, HeavyPathDecomposition) {
    let mut tree = t.clone();
    let mut decomposition = d.clone();
    for k in 0..d.path_count() {
        let path = d.path(k);
        if path.len() < 2 {
            continue;
        }
        let (tail, upper) = path.split_last().unwrap();
        debug_assert!(
            t.children(*tail).iter().all(|&c| d.path_of(c) != k),
            "tail of a nontrivial path has only light children"
        );
        debug_assert!(!t.is_leaf(*tail), "tail of a nontrivial path is internal");
        for &v in upper {
            if t.children(v).len() == 1 {
                let dummy = tree.push_dummy(v);
                decomposition.path_of.push(decomposition.paths.len());
                decomposition.paths.push(vec![dummy]);
            }
        }
    }
    tree.recompute_sizes();
    (tree, decomposition)
}

/// Light children of one path vertex, as super nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub owner: usize,
    pub members: Vec<usize>,
    pub weight: u64,
}

/// Tree of heavy paths ("super nodes"). Super node ids are path ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedTree {
    parent: Vec<Option<usize>>,
    groups: Vec<Vec<Group>>,
}

impl CompressedTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, s: usize) -> Option<usize> {
        self.parent[s]
    }

    /// Groups in apex-to-tail order of their owners.
    pub fn groups(&self, s: usize) -> &[Group] {
        &self.groups[s]
    }

    pub fn children(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.groups[s].iter().flat_map(|g| g.members.iter().copied())
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Number of super nodes on the longest root-to-leaf chain.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.len()];
        let mut best = 0;
        // parents always precede children: ids follow preorder of apexes
        for s in 0..self.len() {
            depth[s] = self.parent[s].map_or(1, |p| depth[p] + 1);
            best = best.max(depth[s]);
        }
        best
    }
}

/// Contracts each heavy path to a super node whose children are grouped by
/// the path vertex they hang from.
pub fn build_compressed_tree(t: &RootedTree, d: &HeavyPathDecomposition) -> Result<CompressedTree> {
    let mut parent = vec![None; d.path_count()];
    let mut groups = vec![Vec::new(); d.path_count()];
    for k in 0..d.path_count() {
        let path = d.path(k);
        if let Some(p) = t.parent(path[0]) {
            parent[k] = Some(d.path_of(p));
        }
        for &v in path {
            let members: Vec<usize> = d.light_children(t, v).map(|c| d.path_of(c)).collect();
            if members.is_empty() {
                if path.len() > 1 {
                    return Err(Error::InternalInvariant(format!(
                        "vertex {v} on nontrivial heavy path {k} has no light child"
                    )));
                }
                continue;
            }
            let weight = members.iter().map(|&m| t.subtree_size(d.apex(m)) as u64).sum();
            groups[k].push(Group { owner: v, members, weight });
        }
    }
    Ok(CompressedTree { parent, groups })
}

/// One line per heavy path: `path k: v0 v1 … (apex=v0)`, dummies as `D<i>`.
pub fn dump_paths(t: &RootedTree, d: &HeavyPathDecomposition) -> String {
    let real = t.real_count();
    let name = |v: usize| {
        if t.is_dummy(v) {
            format!("D{}", v - real)
        } else {
            v.to_string()
        }
    };
    let mut out = String::new();
    for (k, path) in d.paths().iter().enumerate() {
        let members: Vec<String> = path.iter().map(|&v| name(v)).collect();
        let _ = writeln!(out, "path {k}: {} (apex={})", members.join(" "), name(path[0]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_spanning_tree, parse_graph, SpanningStrategy};

    fn tree(text: &str) -> RootedTree {
        build_spanning_tree(&parse_graph(text).unwrap(), 0, SpanningStrategy::BreadthFirst).unwrap()
    }

    fn p4() -> RootedTree {
        tree("4 3\n0 1\n1 2\n2 3\n")
    }

    fn star() -> RootedTree {
        tree("4 3\n0 1\n0 2\n0 3\n")
    }

    #[test]
    fn classify_path_and_star() {
        use EdgeKind::*;
        assert_eq!(classify_edges(&p4()), vec![None, Some(Heavy), Some(Heavy), Some(Light)]);
        assert_eq!(classify_edges(&star()), vec![None, Some(Light), Some(Light), Some(Light)]);
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(&p4()).paths(), &[vec![0, 1, 2], vec![3]]);
        assert_eq!(decompose(&star()).paths(), &[vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(decompose(&tree("1 0\n")).paths(), &[vec![0]]);
    }

    #[test]
    fn dummies_for_path() {
        let t = p4();
        let (aug, d) = insert_dummies(&t, &decompose(&t));
        assert_eq!(aug.len(), 6);
        assert_eq!(aug.children(0), &[1, 4]);
        assert_eq!(aug.children(1), &[2, 5]);
        assert_eq!(aug.children(2), &[3]);
        assert!(aug.is_dummy(4) && aug.is_dummy(5));
        assert_eq!(aug.subtree_size(0), 6);
        assert_eq!(d.paths(), &[vec![0, 1, 2], vec![3], vec![4], vec![5]]);
        assert_eq!(aug.dummy_count(), 2);

        let s = star();
        let (aug, _) = insert_dummies(&s, &decompose(&s));
        assert_eq!(aug.len(), 4);

        let p3 = tree("3 2\n0 1\n1 2\n");
        let d3 = decompose(&p3);
        assert_eq!(d3.paths(), &[vec![0, 1], vec![2]]);
        let (aug, _) = insert_dummies(&p3, &d3);
        assert_eq!(aug.children(0), &[1, 3]);
        assert_eq!(aug.children(1), &[2]);
    }

    #[test]
    fn compressed_tree_examples() {
        let t = p4();
        let (aug, d) = insert_dummies(&t, &decompose(&t));
        let z = build_compressed_tree(&aug, &d).unwrap();
        assert_eq!(z.len(), 4);
        let groups: Vec<(usize, Vec<usize>)> = z.groups(0).iter().map(|g| (g.owner, g.members.clone())).collect();
        // path ids: [0,1,2] -> 0, [3] -> 1, D0 -> 2, D1 -> 3
        assert_eq!(groups, vec![(0, vec![2]), (1, vec![3]), (2, vec![1])]);
        assert!(z.groups(0).iter().all(|g| g.weight == 1));
        assert!((1..4).all(|s| z.groups(s).is_empty() && z.parent(s) == Some(0)));

        let s = star();
        let (aug, d) = insert_dummies(&s, &decompose(&s));
        let z = build_compressed_tree(&aug, &d).unwrap();
        assert_eq!(z.groups(0).len(), 1);
        assert_eq!(z.groups(0)[0].members, vec![1, 2, 3]);
        assert_eq!(z.groups(0)[0].weight, 3);
        assert_eq!(z.depth(), 2);

        let single = tree("1 0\n");
        let d = decompose(&single);
        let z = build_compressed_tree(&single, &d).unwrap();
        assert_eq!(z.len(), 1);
        assert!(z.groups(0).is_empty());
    }

    #[test]
    fn missing_dummies_is_an_internal_error() {
        let t = p4();
        let d = decompose(&t);
        assert!(matches!(build_compressed_tree(&t, &d), Err(Error::InternalInvariant(_))));
    }

    #[test]
    fn dump_format() {
        let t = p4();
        let (aug, d) = insert_dummies(&t, &decompose(&t));
        assert_eq!(
            dump_paths(&aug, &d),
            "path 0: 0 1 2 (apex=0)\npath 1: 3 (apex=3)\npath 2: D0 (apex=D0)\npath 3: D1 (apex=D1)\n"
        );
    }
}
