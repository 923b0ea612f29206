//! Greedy forwarding over any distance oracle.
//!
//! A message at `v` heading for `t` moves to a neighbor strictly closer to
//! `t`. An embedding is greedy when no vertex is ever a dead end, which
//! [`verify_all_pairs`] checks for every ordered pair.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::dyadic::{dyadic_point_distance, DyadicPoint, DyadicRational, TreeAddress};
use crate::embed::EmbeddingTable;
use crate::error::RouteError;
use crate::graph::Graph;

/// Distances between embedded vertices. Only the order of distances matters
/// for routing, so implementations may return any monotone proxy.
pub trait DistanceOracle: Sync {
    type Distance: Ord + Clone + Send + fmt::Display;

    fn vertex_count(&self) -> usize;

    fn distance(&self, v: usize, t: usize) -> Self::Distance;

    /// Distances from every vertex to `t`.
    fn distances_to(&self, t: usize) -> Vec<Self::Distance> {
        (0..self.vertex_count()).map(|v| self.distance(v, t)).collect()
    }
}

/// The dyadic metric evaluated with arbitrary-precision rationals. Simple and
/// obviously right; [`DyadicOracle`] is the fast path.
pub struct ExactDyadicOracle<'a> {
    table: &'a EmbeddingTable,
}

impl<'a> ExactDyadicOracle<'a> {
    pub fn new(table: &'a EmbeddingTable) -> Self {
        ExactDyadicOracle { table }
    }
}

impl DistanceOracle for ExactDyadicOracle<'_> {
    type Distance = DyadicRational;

    fn vertex_count(&self) -> usize {
        self.table.len()
    }

    fn distance(&self, v: usize, t: usize) -> DyadicRational {
        dyadic_point_distance(self.table.point(v), self.table.point(t))
    }
}

type Limbs = SmallVec<[u64; 2]>;

/// Exact dyadic distance as an integer tree part plus a binary fraction in
/// `[0, 1)` stored as MSB-first 64-bit limbs with no trailing zero limb.
/// With that normalization the derived lexicographic order is numeric order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicDistance {
    tree: u64,
    frac: Limbs,
}

impl DyadicDistance {
    pub fn to_rational(&self) -> DyadicRational {
        let mut numerator = num_bigint::BigUint::default();
        for &limb in &self.frac {
            numerator = (numerator << 64usize) + limb;
        }
        let frac = DyadicRational::new(numerator, 64 * self.frac.len() as u32);
        DyadicRational::from_integer(self.tree).add(&frac)
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// `f(y)` left-aligned in limbs: the bits of `y` followed by a one bit.
fn f_limbs(y: &TreeAddress) -> Limbs {
    let mut limbs: Limbs = y.words().iter().copied().collect();
    let (word, bit) = (y.len() / 64, y.len() % 64);
    if word == limbs.len() {
        limbs.push(0);
    }
    limbs[word] |= 1u64 << (63 - bit);
    limbs
}

/// `|a - b|` for left-aligned fractions, trailing zero limbs trimmed.
fn abs_diff_limbs(a: &Limbs, b: &Limbs) -> Limbs {
    let n = a.len().max(b.len());
    let at = |v: &Limbs, i: usize| v.get(i).copied().unwrap_or(0);
    let a_bigger = (0..n).map(|i| at(a, i).cmp(&at(b, i))).find(|o| o.is_ne()) != Some(std::cmp::Ordering::Less);
    let (hi, lo) = if a_bigger { (a, b) } else { (b, a) };
    let mut out: Limbs = SmallVec::from_elem(0, n);
    let mut borrow = false;
    for i in (0..n).rev() {
        let (d, b1) = at(hi, i).overflowing_sub(at(lo, i));
        let (d, b2) = d.overflowing_sub(borrow as u64);
        out[i] = d;
        borrow = b1 || b2;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Exact dyadic metric on machine words.
pub struct DyadicOracle {
    xs: Vec<TreeAddress>,
    fs: Vec<Limbs>,
}

impl DyadicOracle {
    pub fn new(table: &EmbeddingTable) -> DyadicOracle {
        DyadicOracle {
            xs: table.points().iter().map(|p| p.x().clone()).collect(),
            fs: table.points().iter().map(|p| f_limbs(p.y())).collect(),
        }
    }

    pub fn from_points(points: &[DyadicPoint]) -> DyadicOracle {
        DyadicOracle::new(&EmbeddingTable::new(points.to_vec()))
    }
}

impl DistanceOracle for DyadicOracle {
    type Distance = DyadicDistance;

    fn vertex_count(&self) -> usize {
        self.xs.len()
    }

    fn distance(&self, v: usize, t: usize) -> DyadicDistance {
        let (a, b) = (&self.xs[v], &self.xs[t]);
        let tree = (a.len() + b.len() - 2 * a.common_prefix_len(b)) as u64;
        DyadicDistance { tree, frac: abs_diff_limbs(&self.fs[v], &self.fs[t]) }
    }
}

/// Which strictly closer neighbor to forward to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NextHopPolicy {
    /// Closest neighbor; ties to the smallest id.
    #[default]
    SmallestId,
    /// Closest neighbor; ties to the largest id.
    LargestId,
    /// Any strictly closer neighbor, drawn uniformly from a stream seeded by
    /// `(seed, v, t)`.
    RandomCloser { seed: u64 },
}

fn pair_rng(seed: u64, v: usize, t: usize) -> ChaCha8Rng {
    let mix = seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (t as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    ChaCha8Rng::seed_from_u64(mix)
}

/// Next hop from `v` toward `t` given the distance of every vertex to `t`.
pub fn next_hop_with<D: Ord>(
    g: &Graph,
    dist: &[D],
    v: usize,
    t: usize,
    policy: NextHopPolicy,
) -> Result<usize, RouteError> {
    let closer = g.neighbors(v).iter().copied().filter(|&u| dist[u] < dist[v]);
    let pick = match policy {
        NextHopPolicy::SmallestId => closer.min_by(|&a, &b| dist[a].cmp(&dist[b]).then(a.cmp(&b))),
        NextHopPolicy::LargestId => closer.min_by(|&a, &b| dist[a].cmp(&dist[b]).then(b.cmp(&a))),
        NextHopPolicy::RandomCloser { seed } => {
            let options: Vec<usize> = closer.collect();
            (!options.is_empty()).then(|| options[pair_rng(seed, v, t).gen_range(0..options.len())])
        }
    };
    pick.ok_or(RouteError::DeadEnd { at: v, destination: t })
}

fn check_vertex(g: &Graph, v: usize) -> Result<(), RouteError> {
    if v < g.vertex_count() {
        Ok(())
    } else {
        Err(RouteError::InvalidVertex(v))
    }
}

/// Closest neighbor of `v` to `t`, ties to the smallest id.
pub fn next_hop<O: DistanceOracle>(g: &Graph, oracle: &O, v: usize, t: usize) -> Result<usize, RouteError> {
    check_vertex(g, v)?;
    check_vertex(g, t)?;
    let d_v = oracle.distance(v, t);
    g.neighbors(v)
        .iter()
        .map(|&u| (oracle.distance(u, t), u))
        .filter(|(d, _)| *d < d_v)
        .min()
        .map(|(_, u)| u)
        .ok_or(RouteError::DeadEnd { at: v, destination: t })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteResult<D> {
    pub hops: Vec<usize>,
    /// Distance to the destination at each hop.
    pub distances: Vec<D>,
    pub delivered: bool,
}

impl<D> RouteResult<D> {
    pub fn hop_count(&self) -> usize {
        self.hops.len() - 1
    }
}

/// Greedy route from `s` to `t`, at most `n` hops.
pub fn route<O: DistanceOracle>(
    g: &Graph,
    oracle: &O,
    s: usize,
    t: usize,
    policy: NextHopPolicy,
) -> Result<RouteResult<O::Distance>, RouteError> {
    check_vertex(g, s)?;
    check_vertex(g, t)?;
    if s == t {
        return Err(RouteError::SameEndpoints(s));
    }
    let limit = g.vertex_count();
    let mut hops = vec![s];
    let mut distances = vec![oracle.distance(s, t)];
    let mut v = s;
    while v != t {
        if hops.len() > limit {
            return Err(RouteError::HopLimitExceeded { from: s, destination: t, limit });
        }
        let d_v = distances.last().unwrap();
        let candidates: Vec<(usize, O::Distance)> = g
            .neighbors(v)
            .iter()
            .map(|&u| (u, oracle.distance(u, t)))
            .filter(|(_, d)| d < d_v)
            .collect();
        let next = match policy {
            NextHopPolicy::SmallestId => candidates.iter().min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0))),
            NextHopPolicy::LargestId => candidates.iter().min_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))),
            NextHopPolicy::RandomCloser { seed } => {
                (!candidates.is_empty()).then(|| &candidates[pair_rng(seed, v, t).gen_range(0..candidates.len())])
            }
        };
        let (u, d) = next.cloned().ok_or(RouteError::DeadEnd { at: v, destination: t })?;
        hops.push(u);
        distances.push(d);
        v = u;
    }
    Ok(RouteResult { hops, distances, delivered: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    pub policy: NextHopPolicy,
    /// Worker threads; `None` = available parallelism.
    pub threads: Option<usize>,
}

/// Outcome of the all-pairs check.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub pairs_checked: usize,
    /// `(source, destination, stuck vertex)`. Every vertex that has no
    /// strictly closer neighbor toward some destination is listed as its own
    /// source.
    pub failures: Vec<(usize, usize, usize)>,
    /// Pairs whose route under the chosen policy hits a dead end.
    pub undelivered: usize,
    pub max_hops: usize,
    /// Mean of hops over graph distance across delivered pairs.
    pub mean_stretch: f64,
}

impl VerificationReport {
    pub fn is_greedy(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} pairs, {} failures", self.pairs_checked, self.failures.len())
    }
}

/// Partial report for a single destination.
#[derive(Default)]
struct Tally {
    pairs: usize,
    failures: Vec<(usize, usize, usize)>,
    undelivered: usize,
    max_hops: usize,
    stretch_sum: f64,
    delivered: usize,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.pairs += other.pairs;
        self.failures.extend(other.failures);
        self.undelivered += other.undelivered;
        self.max_hops = self.max_hops.max(other.max_hops);
        self.stretch_sum += other.stretch_sum;
        self.delivered += other.delivered;
        self
    }
}

fn check_destination<O: DistanceOracle>(g: &Graph, oracle: &O, t: usize, policy: NextHopPolicy) -> Tally {
    let n = g.vertex_count();
    let dist = oracle.distances_to(t);
    let next: Vec<Option<usize>> =
        (0..n).map(|v| if v == t { None } else { next_hop_with(g, &dist, v, t, policy).ok() }).collect();

    // hops[v]: Some(k) when the policy delivers from v in k hops. Next hops
    // strictly decrease the distance, so following them terminates.
    const UNKNOWN: usize = usize::MAX;
    const STUCK: usize = usize::MAX - 1;
    let mut hops = vec![UNKNOWN; n];
    hops[t] = 0;
    let mut chain = Vec::new();
    for s in 0..n {
        let mut v = s;
        while hops[v] == UNKNOWN {
            chain.push(v);
            match next[v] {
                Some(u) => v = u,
                None => {
                    hops[v] = STUCK;
                    chain.pop();
                }
            }
        }
        let mut h = hops[v];
        while let Some(u) = chain.pop() {
            h = if h == STUCK { STUCK } else { h + 1 };
            hops[u] = h;
        }
    }

    let graph_dist = g.bfs_distances(t);
    let mut tally = Tally { pairs: n - 1, ..Tally::default() };
    for v in (0..n).filter(|&v| v != t) {
        if next[v].is_none() {
            tally.failures.push((v, t, v));
        }
        if hops[v] == STUCK {
            tally.undelivered += 1;
        } else {
            tally.max_hops = tally.max_hops.max(hops[v]);
            tally.stretch_sum += hops[v] as f64 / graph_dist[v] as f64;
            tally.delivered += 1;
        }
    }
    tally
}

fn finish(t: Tally) -> VerificationReport {
    let mut failures = t.failures;
    failures.sort_unstable();
    VerificationReport {
        pairs_checked: t.pairs,
        failures,
        undelivered: t.undelivered,
        max_hops: t.max_hops,
        mean_stretch: if t.delivered == 0 { 0.0 } else { t.stretch_sum / t.delivered as f64 },
    }
}

/// Checks every ordered pair `(v, t)` for a strictly closer neighbor of `v`
/// and simulates the policy's routes for hop and stretch statistics.
pub fn verify_all_pairs<O: DistanceOracle>(g: &Graph, oracle: &O, options: &VerifyOptions) -> VerificationReport {
    let n = g.vertex_count();
    assert_eq!(oracle.vertex_count(), n, "oracle covers every vertex of the graph");
    let policy = options.policy;

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || {
            (0..n)
                .into_par_iter()
                .map(|t| check_destination(g, oracle, t, policy))
                .reduce(Tally::default, Tally::merge)
        };
        let tally = match options.threads {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map(|pool| pool.install(run))
                .unwrap_or_else(|_| run()),
            None => run(),
        };
        finish(tally)
    }

    #[cfg(not(feature = "parallel"))]
    {
        let tally = (0..n).map(|t| check_destination(g, oracle, t, policy)).fold(Tally::default(), Tally::merge);
        finish(tally)
    }
}
