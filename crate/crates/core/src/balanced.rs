//! Order-preserving weight-balanced binary trees and their autocratic form.
//!
//! A weight-balanced tree stores weighted items at its leaves, in order, with
//! item `i` at depth `O(log W/w_i)`. The autocratic transform stretches every
//! leaf edge into a chain as long as the leaf's depth, after which every
//! leaf-to-leaf path is strictly longer than the root-to-leaf path of its
//! target. The embedder uses the resulting root-to-leaf bit strings to place
//! child heavy paths below their parent.

use crate::dyadic::TreeAddress;
use crate::error::BalanceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedItem<K> {
    pub key: K,
    pub weight: u64,
}

impl<K> WeightedItem<K> {
    pub fn new(key: K, weight: u64) -> Self {
        WeightedItem { key, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeNode<K> {
    Leaf(K),
    Branch { left: usize, right: usize },
    /// Unary node; `right` is the direction of its only child edge.
    Chain { child: usize, right: bool },
}

/// Ordered binary tree in an arena; unary chain nodes are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeTree<K> {
    nodes: Vec<ShapeNode<K>>,
    root: usize,
}

impl<K: Clone> ShapeTree<K> {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &ShapeNode<K> {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Leaves in inorder with their root-to-leaf bit strings.
    pub fn leaves(&self) -> Vec<(K, TreeAddress)> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, TreeAddress::root())];
        while let Some((id, path)) = stack.pop() {
            match &self.nodes[id] {
                ShapeNode::Leaf(k) => out.push((k.clone(), path)),
                ShapeNode::Branch { left, right } => {
                    stack.push((*right, path.child(true)));
                    stack.push((*left, path.child(false)));
                }
                ShapeNode::Chain { child, right } => stack.push((*child, path.child(*right))),
            }
        }
        out
    }

    pub fn leaf_depths(&self) -> Vec<usize> {
        self.leaves().iter().map(|(_, p)| p.len()).collect()
    }

    pub fn has_chain_nodes(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, ShapeNode::Chain { .. }))
    }

    fn push(&mut self, node: ShapeNode<K>) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

/// Builds an order-preserving weight-balanced tree by recursive bisection:
/// each range is split at the `k` minimizing `|2·prefix(k) - W|`, ties going
/// to the smallest `k`.
pub fn build_wbt<K: Clone>(items: &[WeightedItem<K>]) -> Result<ShapeTree<K>, BalanceError> {
    if items.is_empty() {
        return Err(BalanceError::EmptyInput);
    }
    if let Some(index) = items.iter().position(|it| it.weight == 0) {
        return Err(BalanceError::ZeroWeight { index });
    }
    let mut prefix = Vec::with_capacity(items.len() + 1);
    prefix.push(0u128);
    for it in items {
        prefix.push(prefix.last().unwrap() + it.weight as u128);
    }
    let mut tree = ShapeTree { nodes: Vec::with_capacity(2 * items.len()), root: 0 };
    tree.root = build_range(items, &prefix, 0, items.len(), &mut tree);
    Ok(tree)
}

fn build_range<K: Clone>(
    items: &[WeightedItem<K>],
    prefix: &[u128],
    lo: usize,
    hi: usize,
    tree: &mut ShapeTree<K>,
) -> usize {
    if hi - lo == 1 {
        return tree.push(ShapeNode::Leaf(items[lo].key.clone()));
    }
    let total = prefix[hi] - prefix[lo];
    let imbalance = |k: usize| (2 * (prefix[k] - prefix[lo])).abs_diff(total);
    // |2·prefix - W| decreases then increases in k, so scan until it rises
    let mut split = lo + 1;
    for k in lo + 2..hi {
        if imbalance(k) < imbalance(split) {
            split = k;
        } else {
            break;
        }
    }
    let left = build_range(items, prefix, lo, split, tree);
    let right = build_range(items, prefix, split, hi, tree);
    tree.push(ShapeNode::Branch { left, right })
}

/// Replaces each leaf's parent edge with a chain of length `1 + depth(parent)`
/// running in the direction of the original edge. A leaf at depth `d` ends up
/// at depth `2d - 1`; internal nodes keep their depth.
pub fn make_autocratic<K: Clone>(t: &ShapeTree<K>) -> ShapeTree<K> {
    let mut out = ShapeTree { nodes: Vec::with_capacity(t.nodes.len() * 2), root: 0 };
    out.root = copy_autocratic(t, t.root, 0, &mut out);
    out
}

fn copy_autocratic<K: Clone>(t: &ShapeTree<K>, id: usize, depth: usize, out: &mut ShapeTree<K>) -> usize {
    match &t.nodes[id] {
        ShapeNode::Leaf(k) => out.push(ShapeNode::Leaf(k.clone())),
        ShapeNode::Branch { left, right } => {
            let l = copy_child(t, *left, false, depth, out);
            let r = copy_child(t, *right, true, depth, out);
            out.push(ShapeNode::Branch { left: l, right: r })
        }
        ShapeNode::Chain { child, right } => {
            let c = copy_child(t, *child, *right, depth, out);
            out.push(ShapeNode::Chain { child: c, right: *right })
        }
    }
}

/// Copies the subtree hanging off an edge from a parent at `parent_depth`.
fn copy_child<K: Clone>(
    t: &ShapeTree<K>,
    id: usize,
    right: bool,
    parent_depth: usize,
    out: &mut ShapeTree<K>,
) -> usize {
    let mut top = copy_autocratic(t, id, parent_depth + 1, out);
    if matches!(t.nodes[id], ShapeNode::Leaf(_)) {
        for _ in 0..parent_depth {
            top = out.push(ShapeNode::Chain { child: top, right });
        }
    }
    top
}

/// Placement of every member of every group below a heavy path's super node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoLevelPlacement {
    /// `members[g][i]`: bit string of member `i` of group `g`.
    pub members: Vec<Vec<TreeAddress>>,
    /// `group_roots[g]`: least common ancestor of group `g`'s members.
    pub group_roots: Vec<TreeAddress>,
    pub tree: ShapeTree<(usize, usize)>,
}

/// Weight-balances the groups, weight-balances each group's members, splices
/// the member trees in at the group leaves, and makes the result autocratic.
/// `groups[g][i]` is the weight of member `i` of group `g`.
pub fn build_two_level(groups: &[Vec<u64>]) -> Result<TwoLevelPlacement, BalanceError> {
    if groups.is_empty() || groups.iter().any(Vec::is_empty) {
        return Err(BalanceError::EmptyInput);
    }
    let outer_items: Vec<_> = groups
        .iter()
        .enumerate()
        .map(|(g, ws)| WeightedItem::new(g, ws.iter().sum()))
        .collect();
    let outer = build_wbt(&outer_items)?;

    let mut spliced: ShapeTree<(usize, usize)> = ShapeTree { nodes: Vec::new(), root: 0 };
    let mut inner_roots = Vec::with_capacity(groups.len());
    for (g, ws) in groups.iter().enumerate() {
        let items: Vec<_> = ws.iter().enumerate().map(|(i, &w)| WeightedItem::new((g, i), w)).collect();
        let inner = build_wbt(&items)?;
        let offset = spliced.nodes.len();
        for node in inner.nodes {
            spliced.nodes.push(match node {
                ShapeNode::Leaf(k) => ShapeNode::Leaf(k),
                ShapeNode::Branch { left, right } => ShapeNode::Branch { left: left + offset, right: right + offset },
                ShapeNode::Chain { child, right } => ShapeNode::Chain { child: child + offset, right },
            });
        }
        inner_roots.push(inner.root + offset);
    }
    let offset = spliced.nodes.len();
    for node in &outer.nodes {
        spliced.nodes.push(match *node {
            ShapeNode::Leaf(_) => ShapeNode::Leaf((usize::MAX, usize::MAX)), // replaced below
            ShapeNode::Branch { left, right } => ShapeNode::Branch { left: left + offset, right: right + offset },
            ShapeNode::Chain { child, right } => ShapeNode::Chain { child: child + offset, right },
        });
    }
    // point outer-leaf references at the group trees
    let redirect: Vec<Option<usize>> = outer
        .nodes
        .iter()
        .map(|n| match n {
            ShapeNode::Leaf(g) => Some(inner_roots[*g]),
            _ => None,
        })
        .collect();
    let fix = |id: usize| -> usize { redirect[id - offset].unwrap_or(id) };
    for node in &mut spliced.nodes[offset..] {
        match node {
            ShapeNode::Branch { left, right } => {
                *left = fix(*left);
                *right = fix(*right);
            }
            ShapeNode::Chain { child, .. } => *child = fix(*child),
            ShapeNode::Leaf(_) => {}
        }
    }
    spliced.root = fix(outer.root + offset);

    let tree = make_autocratic(&spliced);
    let mut members: Vec<Vec<TreeAddress>> = groups.iter().map(|ws| vec![TreeAddress::root(); ws.len()]).collect();
    for ((g, i), path) in tree.leaves() {
        members[g][i] = path;
    }
    let group_roots = members
        .iter()
        .map(|ps| ps.iter().skip(1).fold(ps[0].clone(), |acc, p| acc.lca(p)))
        .collect();
    Ok(TwoLevelPlacement { members, group_roots, tree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn items(ws: &[u64]) -> Vec<WeightedItem<usize>> {
        ws.iter().enumerate().map(|(i, &w)| WeightedItem::new(i, w)).collect()
    }

    fn a(s: &str) -> TreeAddress {
        s.parse().unwrap()
    }

    /// Tie-break oracle: enumerate every split point of the whole range.
    fn best_split(ws: &[u64]) -> usize {
        let total: u64 = ws.iter().sum();
        (1..ws.len())
            .min_by_key(|&k| ((2 * ws[..k].iter().sum::<u64>()) as i64 - total as i64).abs())
            .unwrap()
    }

    #[test]
    fn wbt_examples() {
        assert_eq!(build_wbt(&items(&[1, 1, 1])).unwrap().leaf_depths(), vec![1, 2, 2]);
        assert_eq!(build_wbt(&items(&[1])).unwrap().leaf_depths(), vec![0]);
        assert_eq!(build_wbt(&items(&[8, 1, 1])).unwrap().leaf_depths(), vec![1, 2, 2]);
        assert_eq!(best_split(&[1, 1, 1]), 1);
        assert_eq!(best_split(&[8, 1, 1]), 1);
        assert_eq!(build_wbt::<usize>(&[]), Err(BalanceError::EmptyInput));
        assert_eq!(build_wbt(&items(&[1, 0])), Err(BalanceError::ZeroWeight { index: 1 }));
    }

    #[test]
    fn autocratic_examples() {
        let perfect = build_wbt(&items(&[1, 1, 1, 1])).unwrap();
        assert_eq!(perfect.leaf_depths(), vec![2, 2, 2, 2]);
        let auto = make_autocratic(&perfect);
        assert_eq!(auto.leaf_depths(), vec![3, 3, 3, 3]);
        let leaves = auto.leaves();
        for (_, v) in &leaves {
            for (_, w) in &leaves {
                if v != w {
                    let path = v.len() + w.len() - 2 * v.common_prefix_len(w);
                    assert!(path >= 4 && path > w.len());
                }
            }
        }

        let single = build_wbt(&items(&[5])).unwrap();
        assert_eq!(make_autocratic(&single), single);

        let t = build_wbt(&items(&[1, 1, 1])).unwrap();
        assert_eq!(make_autocratic(&t).leaf_depths(), vec![1, 3, 3]);
    }

    #[test]
    fn chains_follow_the_leaf_edge() {
        let auto = make_autocratic(&build_wbt(&items(&[1, 1, 1])).unwrap());
        let paths: Vec<String> = auto.leaves().iter().map(|(_, p)| p.to_string()).collect();
        assert_eq!(paths, vec!["0", "100", "111"]);
    }

    #[test]
    fn two_level_examples() {
        let p = build_two_level(&[vec![1], vec![1], vec![1]]).unwrap();
        assert_eq!(p.members, vec![vec![a("0")], vec![a("100")], vec![a("111")]]);
        assert_eq!(p.group_roots, vec![a("0"), a("100"), a("111")]);

        let star = build_two_level(&[vec![1, 1, 1]]).unwrap();
        assert_eq!(star.members, vec![vec![a("0"), a("100"), a("111")]]);
        assert_eq!(star.group_roots, vec![a("")]);

        let lone = build_two_level(&[vec![4]]).unwrap();
        assert_eq!(lone.members, vec![vec![a("")]]);

        assert_eq!(build_two_level(&[]), Err(BalanceError::EmptyInput));
        assert_eq!(build_two_level(&[vec![1], vec![]]), Err(BalanceError::EmptyInput));
    }

    #[test]
    fn two_level_groups_occupy_disjoint_subtrees() {
        let p = build_two_level(&[vec![3, 1], vec![1], vec![2, 2, 2], vec![7]]).unwrap();
        for (g, root) in p.group_roots.iter().enumerate() {
            for m in &p.members[g] {
                assert!(root.is_prefix_of(m));
            }
            for (h, other) in p.group_roots.iter().enumerate() {
                if g != h {
                    assert!(!root.is_prefix_of(other));
                }
            }
        }
        // group order is inorder order
        for w in p.group_roots.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    fn pathlen(v: &TreeAddress, w: &TreeAddress) -> usize {
        v.len() + w.len() - 2 * v.common_prefix_len(w)
    }

    proptest! {
        #[test]
        fn wbt_depth_bound_and_order(ws in prop::collection::vec(1u64..1_000_000, 1..120)) {
            let t = build_wbt(&items(&ws)).unwrap();
            prop_assert!(!t.has_chain_nodes());
            let total: u64 = ws.iter().sum();
            let leaves = t.leaves();
            prop_assert_eq!(leaves.iter().map(|(k, _)| *k).collect::<Vec<_>>(), (0..ws.len()).collect::<Vec<_>>());
            for (i, (_, p)) in leaves.iter().enumerate() {
                let bound = 2.0 + 2.0 * (total as f64 / ws[i] as f64).log2();
                prop_assert!(p.len() as f64 <= bound + 1e-9, "item {} depth {} bound {}", i, p.len(), bound);
            }
        }

        #[test]
        fn autocratic_lemma(ws in prop::collection::vec(1u64..1_000_000, 1..120)) {
            let t = build_wbt(&items(&ws)).unwrap();
            let before = t.leaves();
            let auto = make_autocratic(&t);
            let after = auto.leaves();
            let total: u64 = ws.iter().sum();
            // order preserved, depth' = 2·depth - 1
            prop_assert_eq!(before.len(), after.len());
            for ((k0, p0), (k1, p1)) in before.iter().zip(&after) {
                prop_assert_eq!(k0, k1);
                prop_assert_eq!(p1.len(), (2 * p0.len()).saturating_sub(1));
                prop_assert!(p0.is_prefix_of(p1) || p0.is_root());
                let bound = 2.0 * (2.0 + 2.0 * (total as f64 / ws[*k0] as f64).log2());
                prop_assert!((p1.len() as f64) < bound);
            }
            for (_, v) in &after {
                for (_, w) in &after {
                    if v != w {
                        prop_assert!(pathlen(v, w) > w.len());
                    }
                }
            }
            // ancestor identity: for u an ancestor of v in T,
            // d'(u, v) = depth(v) + (depth(v) - depth(u)) - 1
            for ((_, p0), (_, p1)) in before.iter().zip(&after) {
                for du in 0..p0.len() {
                    let u = p0.prefix(du);
                    prop_assert_eq!(pathlen(&u, p1), p0.len() + (p0.len() - du) - 1);
                }
            }
        }
    }
}
