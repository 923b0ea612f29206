//! Graph ingestion and spanning trees.
//!
//! Edge-list format: the first non-comment line is `n m`, followed by `m`
//! lines `u v` with `0 <= u, v < n`. Lines starting with `#` are ignored.

use std::collections::VecDeque;
use std::io::Read;

use crate::error::GraphError;

/// Simple, undirected, connected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, keeping edge order in the adjacency
    /// lists.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::NotSimple(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(GraphError::NotSimple(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::NotSimple(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let g = Graph { adjacency };
        if let Some(unreached) = g.first_unreachable() {
            return Err(GraphError::Disconnected { unreached });
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Unweighted hop distances from `source`.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn first_unreachable(&self) -> Option<usize> {
        self.bfs_distances(0).iter().position(|&d| d == usize::MAX)
    }
}

/// Parses the edge-list text format.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(GraphError::EmptyGraph)?;
    let (n, m) = parse_pair(header_line, header)?;
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut edges = Vec::with_capacity(m);
    for (line, content) in lines {
        if edges.len() == m {
            return Err(GraphError::Parse {
                line,
                message: format!("more than the declared {m} edges"),
            });
        }
        let (u, v) = parse_pair(line, content)?;
        if u >= n || v >= n {
            return Err(GraphError::Parse {
                line,
                message: format!("vertex out of range 0..{n}"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() < m {
        return Err(GraphError::Parse {
            line: text.lines().count(),
            message: format!("expected {m} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, &edges)
}

/// Reads and parses a graph from a byte stream.
pub fn load_graph<R: Read>(mut reader: R) -> Result<Graph, GraphError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| GraphError::Parse {
        line: 0,
        message: format!("unreadable input: {e}"),
    })?;
    parse_graph(&text)
}

fn parse_pair(line: usize, content: &str) -> Result<(usize, usize), GraphError> {
    let mut fields = content.split_whitespace();
    let mut next = |what: &str| -> Result<usize, GraphError> {
        let field = fields.next().ok_or_else(|| GraphError::Parse {
            line,
            message: format!("missing {what}"),
        })?;
        field.parse().map_err(|_| GraphError::Parse {
            line,
            message: format!("{what} {field:?} is not a non-negative integer"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if fields.next().is_some() {
        return Err(GraphError::Parse {
            line,
            message: "expected exactly two fields".into(),
        });
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpanningStrategy {
    #[default]
    BreadthFirst,
    DepthFirst,
}

/// Rooted ordered tree. Real vertices keep their graph ids; dummy leaves added
/// during decomposition get ids from `real_count()` upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    subtree_size: Vec<usize>,
    is_dummy: Vec<bool>,
}

impl RootedTree {
    /// Builds a tree from parent links and ordered child lists.
    pub fn from_children(root: usize, children: Vec<Vec<usize>>) -> RootedTree {
        let n = children.len();
        let mut parent = vec![None; n];
        for (v, cs) in children.iter().enumerate() {
            for &c in cs {
                parent[c] = Some(v);
            }
        }
        let mut t = RootedTree {
            root,
            parent,
            children,
            subtree_size: vec![1; n],
            is_dummy: vec![false; n],
        };
        t.recompute_sizes();
        t
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Total node count, dummies included.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn real_count(&self) -> usize {
        self.is_dummy.iter().filter(|d| !**d).count()
    }

    pub fn dummy_count(&self) -> usize {
        self.len() - self.real_count()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        self.subtree_size[v]
    }

    pub fn is_dummy(&self, v: usize) -> bool {
        self.is_dummy[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// Nodes in preorder, children visited in stored order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// `(child, parent)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
    }

    /// Appends a dummy leaf as the last child of `owner` and returns its id.
    /// Sizes are stale until [`RootedTree::recompute_sizes`].
    pub(crate) fn push_dummy(&mut self, owner: usize) -> usize {
        let id = self.len();
        self.parent.push(Some(owner));
        self.children.push(Vec::new());
        self.subtree_size.push(1);
        self.is_dummy.push(true);
        self.children[owner].push(id);
        id
    }

    pub(crate) fn recompute_sizes(&mut self) {
        let order = self.preorder();
        self.subtree_size.iter_mut().for_each(|s| *s = 1);
        for &v in order.iter().rev() {
            if let Some(p) = self.parent[v] {
                self.subtree_size[p] += self.subtree_size[v];
            }
        }
    }
}

/// Spanning tree of `g` rooted at `root`. Children appear in the adjacency
/// order in which they were discovered.
pub fn build_spanning_tree(
    g: &Graph,
    root: usize,
    strategy: SpanningStrategy,
) -> Result<RootedTree, GraphError> {
    let n = g.vertex_count();
    if root >= n {
        return Err(GraphError::InvalidRoot { root, vertex_count: n });
    }
    let mut visited = vec![false; n];
    let mut children = vec![Vec::new(); n];
    visited[root] = true;
    match strategy {
        SpanningStrategy::BreadthFirst => {
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &w in g.neighbors(u) {
                    if !visited[w] {
                        visited[w] = true;
                        children[u].push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        SpanningStrategy::DepthFirst => {
            // (vertex, index of the next neighbor to try)
            let mut stack = vec![(root, 0usize)];
            while let Some((u, i)) = stack.last_mut() {
                let u = *u;
                match g.neighbors(u).get(*i) {
                    Some(&w) => {
                        *i += 1;
                        if !visited[w] {
                            visited[w] = true;
                            children[u].push(w);
                            stack.push((w, 0));
                        }
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
    }
    if let Some(unreached) = visited.iter().position(|v| !v) {
        return Err(GraphError::Disconnected { unreached });
    }
    Ok(RootedTree::from_children(root, children))
}
