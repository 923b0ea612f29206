//! Deterministic graph generators for tests, benchmarks and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

fn build(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges).expect("generated graph is simple and connected")
}

/// `0 - 1 - … - (n-1)`.
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    build(n, &edges)
}

/// Center `0` joined to every other vertex.
pub fn star(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    build(n, &edges)
}

/// A spine of `spine` vertices, each carrying `legs` pendant leaves.
pub fn caterpillar(spine: usize, legs: usize) -> Graph {
    let n = spine * (1 + legs);
    let mut edges: Vec<_> = (1..spine).map(|v| (v - 1, v)).collect();
    let mut next = spine;
    for s in 0..spine {
        for _ in 0..legs {
            edges.push((s, next));
            next += 1;
        }
    }
    build(n, &edges)
}

/// Heap-ordered complete binary tree of the given height (`2^(h+1) - 1`
/// vertices).
pub fn complete_binary_tree(height: u32) -> Graph {
    let n = (1usize << (height + 1)) - 1;
    let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    build(n, &edges)
}

/// Uniformly random labelled tree, decoded from a random Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> Graph {
    if n <= 2 {
        return path(n.max(1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(std::cmp::Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("a Prüfer sequence always leaves a leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(u) = leaves.pop().unwrap();
    let std::cmp::Reverse(v) = leaves.pop().unwrap();
    edges.push((u, v));
    build(n, &edges)
}

/// Erdős–Rényi `G(n, p)`, resampled until connected.
///
/// # Panics
///
/// If no connected sample turns up within 10 000 attempts.
pub fn gnp_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        if let Ok(g) = Graph::from_edges(n, &edges) {
            return g;
        }
    }
    panic!("G({n}, {p}) produced no connected sample");
}
