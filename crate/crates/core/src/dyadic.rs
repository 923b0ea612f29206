//! Exact arithmetic on the infinite binary tree.
//!
//! A node is a [`TreeAddress`], the left/right bit string from the root. The
//! map `f` sends a node to the dyadic rational whose binary expansion is
//! `0.<bits>1`, so the root goes to 1/2, its children to 1/4 and 3/4, and so
//! on. Points of the dyadic tree metric are pairs `(x, y)` with `x` an
//! ancestor of `y`; their distance is the tree distance between the `x`s plus
//! `|f(y) - f(y')|`. Nothing here touches floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

const WORD: usize = 64;

/// Node of the infinite binary tree; `false` = left, `true` = right.
///
/// Bits are packed most-significant first so that common prefixes fall out of
/// an XOR and a leading-zero count. Unused trailing bits are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TreeAddress {
    words: Vec<u64>,
    len: usize,
}

impl TreeAddress {
    pub fn root() -> TreeAddress {
        TreeAddress::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> TreeAddress {
        let mut a = TreeAddress::root();
        for b in bits {
            a.push(b);
        }
        a
    }

    /// Depth in the tree.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for address of depth {}", self.len);
        self.words[i / WORD] >> (WORD - 1 - i % WORD) & 1 == 1
    }

    pub fn last_bit(&self) -> Option<bool> {
        self.len.checked_sub(1).map(|i| self.bit(i))
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (WORD - 1 - self.len % WORD);
        }
        self.len += 1;
    }

    pub fn child(&self, bit: bool) -> TreeAddress {
        let mut c = self.clone();
        c.push(bit);
        c
    }

    pub fn parent(&self) -> Option<TreeAddress> {
        self.len.checked_sub(1).map(|l| self.prefix(l))
    }

    /// `self` followed by the bits of `suffix`.
    pub fn concat(&self, suffix: &TreeAddress) -> TreeAddress {
        let mut a = self.clone();
        for b in suffix.bits() {
            a.push(b);
        }
        a
    }

    /// The ancestor at depth `len`.
    pub fn prefix(&self, len: usize) -> TreeAddress {
        assert!(len <= self.len);
        let mut words = self.words[..len.div_ceil(WORD)].to_vec();
        if !len.is_multiple_of(WORD) {
            let last = words.len() - 1;
            words[last] &= !0u64 << (WORD - len % WORD);
        }
        TreeAddress { words, len }
    }

    /// Bits of `self` after the first `start`.
    pub fn suffix_from(&self, start: usize) -> TreeAddress {
        TreeAddress::from_bits((start..self.len).map(|i| self.bit(i)))
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &TreeAddress) -> usize {
        let limit = self.len.min(other.len);
        for (i, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let diff = a ^ b;
            if diff != 0 {
                return (i * WORD + diff.leading_zeros() as usize).min(limit);
            }
        }
        limit
    }

    /// Ancestry test (every node is its own ancestor).
    pub fn is_prefix_of(&self, other: &TreeAddress) -> bool {
        self.len <= other.len && self.common_prefix_len(other) == self.len
    }

    /// Least common ancestor.
    pub fn lca(&self, other: &TreeAddress) -> TreeAddress {
        self.prefix(self.common_prefix_len(other))
    }

    /// Packed words, most significant bit first.
    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl Ord for TreeAddress {
    /// Inorder: the order of `f` values.
    fn cmp(&self, other: &TreeAddress) -> Ordering {
        let c = self.common_prefix_len(other);
        match (c == self.len, c == other.len) {
            (true, true) => Ordering::Equal,
            // self is a proper ancestor: other is to the right iff it went right
            (true, false) => {
                if other.bit(c) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (false, true) => {
                if self.bit(c) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (false, false) => self.bit(c).cmp(&other.bit(c)),
        }
    }
}

impl PartialOrd for TreeAddress {
    fn partial_cmp(&self, other: &TreeAddress) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return f.write_str("ε");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseAddressError(pub char);

impl fmt::Display for ParseAddressError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid address character {:?}", self.0)
    }
}

impl std::error::Error for ParseAddressError {}

impl FromStr for TreeAddress {
    type Err = ParseAddressError;

    /// Accepts a string of `0`/`1`; the empty string and `ε` denote the root.
    fn from_str(s: &str) -> Result<TreeAddress, ParseAddressError> {
        if s == "ε" {
            return Ok(TreeAddress::root());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseAddressError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(TreeAddress::from_bits)
    }
}

/// Non-negative dyadic rational `numerator / 2^exponent` in lowest terms
/// (odd numerator, or zero with exponent 0).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: BigUint, exponent: u32) -> DyadicRational {
        let mut r = DyadicRational { numerator, exponent };
        r.normalize();
        r
    }

    pub fn zero() -> DyadicRational {
        DyadicRational { numerator: BigUint::zero(), exponent: 0 }
    }

    pub fn from_integer(n: u64) -> DyadicRational {
        DyadicRational::new(BigUint::from(n), 0)
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0).min(self.exponent as u64) as u32;
        if tz > 0 {
            self.numerator >>= tz as usize;
            self.exponent -= tz;
        }
    }

    /// Numerators of both operands over the common denominator `2^e`.
    fn aligned(&self, other: &DyadicRational) -> (BigUint, BigUint, u32) {
        let e = self.exponent.max(other.exponent);
        (
            &self.numerator << (e - self.exponent) as usize,
            &other.numerator << (e - other.exponent) as usize,
            e,
        )
    }

    pub fn add(&self, other: &DyadicRational) -> DyadicRational {
        let (a, b, e) = self.aligned(other);
        DyadicRational::new(a + b, e)
    }

    pub fn abs_diff(&self, other: &DyadicRational) -> DyadicRational {
        let (a, b, e) = self.aligned(other);
        let d = if a >= b { a - b } else { b - a };
        DyadicRational::new(d, e)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.numerator.bits();
        // keep 64 significant bits before scaling to avoid overflow
        let shift = bits.saturating_sub(64);
        let top = (&self.numerator >> shift as usize).to_f64().unwrap_or(f64::INFINITY);
        top * 2f64.powi(shift as i32 - self.exponent as i32)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &DyadicRational) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &DyadicRational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, BigUint::one() << self.exponent as usize)
        }
    }
}

/// `f(a)`: the binary fraction `0.<bits of a>1`.
pub fn f_value(a: &TreeAddress) -> DyadicRational {
    let mut numerator = BigUint::zero();
    for b in a.bits() {
        numerator <<= 1;
        if b {
            numerator += 1u32;
        }
    }
    numerator = (numerator << 1) + 1u32;
    DyadicRational { numerator, exponent: a.len() as u32 + 1 }
}

/// Number of edges between two nodes of the binary tree.
pub fn tree_distance(a: &TreeAddress, b: &TreeAddress) -> usize {
    a.len() + b.len() - 2 * a.common_prefix_len(b)
}

/// Point of the dyadic tree metric space; `x` is an ancestor of `y`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DyadicPoint {
    x: TreeAddress,
    y: TreeAddress,
}

impl DyadicPoint {
    /// `None` when `x` is not an ancestor of `y`.
    pub fn new(x: TreeAddress, y: TreeAddress) -> Option<DyadicPoint> {
        x.is_prefix_of(&y).then_some(DyadicPoint { x, y })
    }

    /// The point `(a, a)`.
    pub fn at(a: TreeAddress) -> DyadicPoint {
        DyadicPoint { x: a.clone(), y: a }
    }

    pub fn x(&self) -> &TreeAddress {
        &self.x
    }

    pub fn y(&self) -> &TreeAddress {
        &self.y
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Exact distance in the dyadic tree metric.
pub fn dyadic_point_distance(p: &DyadicPoint, q: &DyadicPoint) -> DyadicRational {
    let tree = DyadicRational::from_integer(tree_distance(&p.x, &q.x) as u64);
    tree.add(&f_value(&p.y).abs_diff(&f_value(&q.y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn a(s: &str) -> TreeAddress {
        s.parse().unwrap()
    }

    fn q(num: u64, exp: u32) -> DyadicRational {
        DyadicRational::new(BigUint::from(num), exp)
    }

    /// Every address of depth at most `max_depth`.
    fn all_addresses(max_depth: usize) -> Vec<TreeAddress> {
        let mut out = vec![TreeAddress::root()];
        let mut i = 0;
        while i < out.len() {
            if out[i].len() < max_depth {
                let (l, r) = (out[i].child(false), out[i].child(true));
                out.push(l);
                out.push(r);
            }
            i += 1;
        }
        out
    }

    /// `f` by the level-recursive rule: root 1/2, children `f(x) ± 2^(-i-2)`.
    fn f_recursive(a: &TreeAddress) -> DyadicRational {
        let mut num: i128 = 1;
        let mut exp = 1u32;
        for (i, b) in a.bits().enumerate() {
            // f(x) ± 2^(-i-2) over denominator 2^(i+2)
            num *= 2;
            exp = i as u32 + 2;
            num += if b { 1 } else { -1 };
        }
        DyadicRational::new(BigUint::from(num as u128), exp)
    }

    #[test]
    fn f_values() {
        assert_eq!(f_value(&a("")), q(1, 1));
        assert_eq!(f_value(&a("0")), q(1, 2));
        assert_eq!(f_value(&a("1")), q(3, 2));
        assert_eq!(f_value(&a("100")), q(9, 4));
        assert_eq!(f_value(&a("100")).to_string(), "9/16");
    }

    #[test]
    fn closed_form_matches_recursive_rule() {
        for addr in all_addresses(10) {
            assert_eq!(f_value(&addr), f_recursive(&addr), "{addr}");
        }
    }

    #[test]
    fn inorder_is_f_order_and_within_unit_interval() {
        let addrs = all_addresses(6);
        let one = DyadicRational::from_integer(1);
        for x in &addrs {
            let fx = f_value(x);
            assert!(fx > DyadicRational::zero() && fx < one);
            for y in &addrs {
                assert_eq!(x.cmp(y), fx.cmp(&f_value(y)), "{x} vs {y}");
                assert!(fx.abs_diff(&f_value(y)) < one);
            }
        }
    }

    #[test]
    fn tree_distances() {
        assert_eq!(tree_distance(&a(""), &a("111")), 3);
        assert_eq!(tree_distance(&a("0"), &a("100")), 4);
        assert_eq!(tree_distance(&a("0110"), &a("0110")), 0);
    }

    #[test]
    fn tree_distance_matches_bfs() {
        let addrs = all_addresses(6);
        let index: HashMap<_, _> = addrs.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let neighbors = |x: &TreeAddress| {
            let mut v: Vec<TreeAddress> = x.parent().into_iter().collect();
            if x.len() < 6 {
                v.push(x.child(false));
                v.push(x.child(true));
            }
            v
        };
        for (s, src) in addrs.iter().enumerate() {
            let mut dist = vec![usize::MAX; addrs.len()];
            dist[s] = 0;
            let mut queue = VecDeque::from([src.clone()]);
            while let Some(x) = queue.pop_front() {
                let dx = dist[index[&x]];
                for y in neighbors(&x) {
                    if dist[index[&y]] == usize::MAX {
                        dist[index[&y]] = dx + 1;
                        queue.push_back(y);
                    }
                }
            }
            for (t, dst) in addrs.iter().enumerate() {
                assert_eq!(tree_distance(src, dst), dist[t]);
            }
        }
    }

    #[test]
    fn point_distances() {
        let p = DyadicPoint::new(a(""), a("0")).unwrap();
        let r = DyadicPoint::new(a(""), a("100")).unwrap();
        let s = DyadicPoint::at(a("111"));
        assert_eq!(dyadic_point_distance(&p, &r), q(5, 4));
        assert_eq!(dyadic_point_distance(&p, &s), q(59, 4));
        assert_eq!(dyadic_point_distance(&p, &s).to_string(), "59/16");
        assert!(dyadic_point_distance(&p, &p).is_zero());
    }

    #[test]
    fn point_requires_ancestor() {
        assert!(DyadicPoint::new(a("1"), a("01")).is_none());
        assert!(DyadicPoint::new(a("01"), a("01")).is_some());
    }

    #[test]
    fn dyadic_metric_axioms_exhaustive() {
        let addrs = all_addresses(4);
        let mut points = Vec::new();
        for x in &addrs {
            for y in &addrs {
                if let Some(p) = DyadicPoint::new(x.clone(), y.clone()) {
                    points.push(p);
                }
            }
        }
        let n = points.len();
        let d: Vec<Vec<DyadicRational>> = points
            .iter()
            .map(|p| points.iter().map(|q| dyadic_point_distance(p, q)).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[i][j], d[j][i]);
                assert_eq!(d[i][j].is_zero(), i == j);
                for k in 0..n {
                    assert!(d[i][k] <= d[i][j].add(&d[j][k]));
                }
            }
        }
    }

    #[test]
    fn address_ops() {
        let x = a("0110");
        assert_eq!(x.prefix(2), a("01"));
        assert_eq!(x.lca(&a("0100")), a("01"));
        assert_eq!(x.suffix_from(1), a("110"));
        assert_eq!(a("01").concat(&a("10")), x);
        assert_eq!(x.parent(), Some(a("011")));
        assert_eq!(x.last_bit(), Some(false));
        assert_eq!(TreeAddress::root().to_string(), "ε");
        assert_eq!(a("ε"), TreeAddress::root());
        assert!(a("01").is_prefix_of(&x));
        assert!(!a("1").is_prefix_of(&x));
        assert!("01x".parse::<TreeAddress>().is_err());
        // long addresses cross word boundaries
        let long: TreeAddress = TreeAddress::from_bits((0..150).map(|i| i % 3 == 0));
        let mut other = long.prefix(130);
        other.push(!long.bit(130));
        assert_eq!(long.common_prefix_len(&other), 130);
        assert_eq!(long.prefix(130), other.prefix(130));
        assert_eq!(tree_distance(&long, &other), 20 + 1);
    }

    #[test]
    fn rational_display_and_float() {
        assert_eq!(q(27, 3).to_string(), "27/8");
        assert_eq!(q(6, 1).to_string(), "3");
        assert_eq!(DyadicRational::zero().to_string(), "0");
        assert_eq!(q(59, 4).to_f64(), 3.6875);
    }
}
