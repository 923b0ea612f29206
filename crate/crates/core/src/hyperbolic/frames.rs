//! Node frames, vertex points and the buffer-zone geometry.
//!
//! A frame is a Minkowski isometry taking local coordinates at a node (node at
//! the origin, parent in direction π) to global ones. A child's frame is its
//! parent's composed with a rotation to the child's direction and a boost by
//! `L`. Children of a right child (or the root) sit one and three heptagon
//! steps counterclockwise from the parent direction, left child first; a left
//! child's picture is mirrored.

use std::collections::HashMap;
use std::f64::consts::PI;

use astro_float::{BigFloat, Consts};

use super::{to_f64, HyperbolicParams, MinkowskiPoint, RM};
use crate::dyadic::{DyadicPoint, TreeAddress};
use crate::embed::EmbeddingTable;
use crate::error::HyperbolicError;
use crate::Side;

/// 3×3 matrix acting on `(t, u, v)` column vectors.
#[derive(Debug, Clone)]
struct Mat3([[BigFloat; 3]; 3]);

impl Mat3 {
    fn from_f64(rows: [[f64; 3]; 3], p: usize) -> Mat3 {
        Mat3(rows.map(|r| r.map(|x| BigFloat::from_f64(x, p))))
    }

    fn mul(&self, other: &Mat3, p: usize) -> Mat3 {
        let mut out = Mat3::from_f64([[0.0; 3]; 3], p);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = BigFloat::new(p);
                for k in 0..3 {
                    acc = acc.add(&self.0[i][k].mul(&other.0[k][j], p, RM), p, RM);
                }
                out.0[i][j] = acc;
            }
        }
        out
    }

    fn apply(&self, x: &[BigFloat; 3], p: usize) -> [BigFloat; 3] {
        std::array::from_fn(|i| {
            let mut acc = BigFloat::new(p);
            for (k, xk) in x.iter().enumerate() {
                acc = acc.add(&self.0[i][k].mul(xk, p, RM), p, RM);
            }
            acc
        })
    }
}

/// Rotation by `theta` followed (on the right) by a boost of `ch = cosh L`,
/// `sh = sinh L` along the local `u` axis.
fn rotate_boost(c: &BigFloat, s: &BigFloat, ch: &BigFloat, sh: &BigFloat, p: usize) -> Mat3 {
    let zero = BigFloat::new(p);
    Mat3([
        [ch.clone(), sh.clone(), zero],
        [c.mul(sh, p, RM), c.mul(ch, p, RM), s.neg()],
        [s.mul(sh, p, RM), s.mul(ch, p, RM), c.clone()],
    ])
}

fn rotation(c: &BigFloat, s: &BigFloat, p: usize) -> Mat3 {
    let (zero, one) = (BigFloat::new(p), BigFloat::from_u8(1, p));
    Mat3([[one, zero.clone(), zero.clone()], [zero.clone(), c.clone(), s.neg()], [zero, s.clone(), c.clone()]])
}

/// Local direction of a node's child, measured from its own `u` axis.
pub fn child_angle(side: Side, right: bool) -> f64 {
    let step = 2.0 * PI / 7.0;
    match (side.is_right_like(), right) {
        (true, false) => PI + step,
        (true, true) => PI + 3.0 * step,
        (false, true) => PI - step,
        (false, false) => PI - 3.0 * step,
    }
}

fn side_of(a: &TreeAddress) -> Side {
    a.last_bit().map_or(Side::Root, Side::from_bit)
}

/// Placement and orientation of one binary-tree node.
#[derive(Debug, Clone)]
pub struct NodeFrame {
    side: Side,
    transform: Mat3,
}

impl NodeFrame {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn position(&self) -> MinkowskiPoint {
        let [t, u, v] = [0, 1, 2].map(|i| self.transform.0[i][0].clone());
        MinkowskiPoint { t, u, v }
    }
}

/// A hyperbolic line given by its two ideal endpoints as null vectors.
#[derive(Debug, Clone)]
pub struct IdealLine {
    pub a: [BigFloat; 3],
    pub b: [BigFloat; 3],
}

impl IdealLine {
    /// Endpoints on the unit circle of the Poincaré disk.
    pub fn endpoints_poincare(&self, p: usize) -> [(f64, f64); 2] {
        [&self.a, &self.b].map(|x| (to_f64(&x[1].div(&x[0], p, RM)), to_f64(&x[2].div(&x[0], p, RM))))
    }
}

/// Band crossed by the tree edge from `parent` to `child`: between the lines
/// perpendicular to the edge at distances `d7` and `d7 + D` from the parent.
#[derive(Debug, Clone)]
pub struct BufferZone {
    pub child: TreeAddress,
    pub near: IdealLine,
    pub far: IdealLine,
}

/// Frames of a set of binary-tree nodes, closed under taking parents.
#[derive(Debug, Clone)]
pub struct FrameMap {
    params: HyperbolicParams,
    frames: HashMap<TreeAddress, NodeFrame>,
    /// `[right-like parent][bit]` → rotation + boost to that child.
    relative: [[Mat3; 2]; 2],
    /// `[right-like parent][bit]` → `(cos, sin)` of the child direction.
    directions: [[(BigFloat, BigFloat); 2]; 2],
    /// `(cos, sin)` of the heptagon's ideal vertices, `π + (2k − 1)π/7`.
    heptagon_vertices: Vec<(BigFloat, BigFloat)>,
    d7: BigFloat,
    cosh_r: BigFloat,
    sinh_r: BigFloat,
}

/// Frames for every address used by `table` and all their ancestors.
pub fn place_frames(table: &EmbeddingTable, params: &HyperbolicParams) -> Result<FrameMap, HyperbolicError> {
    place_frames_for(table.points().iter().map(|p| p.y()), params)
}

/// Frames for the given addresses and all their ancestors.
pub fn place_frames_for<'a, I>(addresses: I, params: &HyperbolicParams) -> Result<FrameMap, HyperbolicError>
where
    I: IntoIterator<Item = &'a TreeAddress>,
{
    params.validate()?;
    let p = params.precision_bits;
    let mut cc = Consts::new().map_err(|e| HyperbolicError::InvalidParameter(format!("constant cache: {e:?}")))?;
    let d7 = super::polygon_apothem_big(7, p, &mut cc);
    let edge = BigFloat::from_f64(params.d, p).add(&d7.mul(&BigFloat::from_u8(2, p), p, RM), p, RM);
    let (ch, sh) = (edge.cosh(p, RM, &mut cc), edge.sinh(p, RM, &mut cc));
    let pi = cc.pi(p, RM);
    let angle = |side: Side, right: bool| {
        // π ± k·2π/7 exactly at working precision
        let steps = match (side.is_right_like(), right) {
            (true, false) => 1i32,
            (true, true) => 3,
            (false, true) => -1,
            (false, false) => -3,
        };
        let step = pi.mul(&BigFloat::from_u8(2, p), p, RM).div(&BigFloat::from_u8(7, p), p, RM);
        pi.add(&step.mul(&BigFloat::from_i32(steps, p), p, RM), p, RM)
    };
    let mut directions: [[(BigFloat, BigFloat); 2]; 2] = Default::default();
    for (right_like, side) in [(0, Side::Left), (1, Side::Right)] {
        for bit in 0..2 {
            let a = angle(side, bit == 1);
            directions[right_like][bit] = (a.cos(p, RM, &mut cc), a.sin(p, RM, &mut cc));
        }
    }
    let relative = [0, 1].map(|s| {
        [0, 1].map(|b| {
            let (c, s) = &directions[s][b];
            rotate_boost(c, s, &ch, &sh, p)
        })
    });
    let heptagon_vertices = (0..7)
        .map(|k| {
            let a = pi.add(&pi.mul(&BigFloat::from_i32(2 * k - 1, p), p, RM).div(&BigFloat::from_u8(7, p), p, RM), p, RM);
            (a.cos(p, RM, &mut cc), a.sin(p, RM, &mut cc))
        })
        .collect();
    let half_pi = pi.div(&BigFloat::from_u8(2, p), p, RM).neg();
    let root = rotation(&half_pi.cos(p, RM, &mut cc), &half_pi.sin(p, RM, &mut cc), p);
    let r = BigFloat::from_f64(params.circle_radius, p);
    let mut map = FrameMap {
        params: *params,
        frames: HashMap::new(),
        relative,
        directions,
        heptagon_vertices,
        d7,
        cosh_r: r.cosh(p, RM, &mut cc),
        sinh_r: r.sinh(p, RM, &mut cc),
    };
    map.frames.insert(TreeAddress::root(), NodeFrame { side: Side::Root, transform: root });
    for a in addresses {
        map.insert(a);
    }
    map.check_norms()?;
    Ok(map)
}

impl FrameMap {
    pub fn params(&self) -> &HyperbolicParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn get(&self, a: &TreeAddress) -> Option<&NodeFrame> {
        self.frames.get(a)
    }

    /// Placed addresses in f order.
    pub fn addresses(&self) -> Vec<&TreeAddress> {
        let mut out: Vec<_> = self.frames.keys().collect();
        out.sort();
        out
    }

    fn frame(&self, a: &TreeAddress) -> Result<&NodeFrame, HyperbolicError> {
        self.frames.get(a).ok_or_else(|| HyperbolicError::MissingFrame(a.to_string()))
    }

    fn rel(&self, parent_side: Side, bit: bool) -> &Mat3 {
        &self.relative[parent_side.is_right_like() as usize][bit as usize]
    }

    /// Places `a` and any missing ancestors.
    pub fn insert(&mut self, a: &TreeAddress) {
        let p = self.params.precision_bits;
        let mut known = a.len();
        while !self.frames.contains_key(&a.prefix(known)) {
            known -= 1;
        }
        for k in known..a.len() {
            let parent = &self.frames[&a.prefix(k)];
            let bit = a.bit(k);
            let frame = NodeFrame {
                side: Side::from_bit(bit),
                transform: parent.transform.mul(self.rel(parent.side, bit), p),
            };
            self.frames.insert(a.prefix(k + 1), frame);
        }
    }

    /// Largest hyperboloid drift over all placed positions, against the
    /// tolerance `2^(−precision/2)`.
    pub fn check_norms(&self) -> Result<(), HyperbolicError> {
        let p = self.params.precision_bits;
        let tolerance_bits = p / 2;
        let mut tolerance = BigFloat::from_u8(1, p);
        tolerance.set_exponent(-(tolerance_bits as i32) + 1);
        for frame in self.frames.values() {
            let drift = frame.position().norm_drift(p);
            if drift.is_nan() || drift.cmp(&tolerance).is_none_or(|o| o > 0) {
                let drift_log2 = drift.exponent().map_or(i64::MAX, |e| e as i64);
                return Err(HyperbolicError::PrecisionExhausted { precision: p, drift_log2, tolerance_bits });
            }
        }
        Ok(())
    }

    /// Local coordinates of the node `y` in the frame of its ancestor `x`.
    fn local_target(&self, x: &TreeAddress, y: &TreeAddress) -> [BigFloat; 3] {
        let p = self.params.precision_bits;
        let mut v = [BigFloat::from_u8(1, p), BigFloat::new(p), BigFloat::new(p)];
        // apply the relative steps innermost first
        for k in (x.len()..y.len()).rev() {
            v = self.rel(side_of(&y.prefix(k)), y.bit(k)).apply(&v, p);
        }
        v
    }

    /// Unit direction `(cos, sin)` at `x` toward its descendant `y`, in `x`'s
    /// local frame; toward the parent for `x = y`.
    fn local_direction(&self, x: &TreeAddress, y: &TreeAddress) -> (BigFloat, BigFloat) {
        let p = self.params.precision_bits;
        if x == y {
            return (BigFloat::from_i8(-1, p), BigFloat::new(p));
        }
        let [_, u, v] = self.local_target(x, y);
        let rho = u.mul(&u, p, RM).add(&v.mul(&v, p, RM), p, RM).sqrt(p, RM);
        (u.div(&rho, p, RM), v.div(&rho, p, RM))
    }

    /// Angle in `x`'s local frame of the geodesic toward `y` (π for `x = y`).
    pub fn direction_angle(&self, x: &TreeAddress, y: &TreeAddress) -> Result<f64, HyperbolicError> {
        self.frame(y)?;
        let (c, s) = self.local_direction(x, y);
        Ok(to_f64(&s).atan2(to_f64(&c)))
    }

    /// Point at distance `radius` from node `x` in local direction `(c, s)`.
    fn circle_point(&self, x: &TreeAddress, c: &BigFloat, s: &BigFloat, radius: Option<f64>) -> Result<MinkowskiPoint, HyperbolicError> {
        let p = self.params.precision_bits;
        let (ch, sh) = match radius {
            None => (self.cosh_r.clone(), self.sinh_r.clone()),
            Some(r) => {
                let mut cc = Consts::new().map_err(|_| HyperbolicError::DomainError)?;
                let r = BigFloat::from_f64(r, p);
                (r.cosh(p, RM, &mut cc), r.sinh(p, RM, &mut cc))
            }
        };
        let local = [ch, sh.mul(c, p, RM), sh.mul(s, p, RM)];
        let [t, u, v] = self.frame(x)?.transform.apply(&local, p);
        Ok(MinkowskiPoint { t, u, v })
    }

    /// Hyperbolic position of a dyadic point: on the circle of radius
    /// `circle_radius` around `x`, on the geodesic toward `y` (toward the
    /// parent, or heading π/2 at the root, when `x = y`).
    pub fn vertex_point(&self, point: &DyadicPoint) -> Result<MinkowskiPoint, HyperbolicError> {
        self.frame(point.y())?;
        let (c, s) = self.local_direction(point.x(), point.y());
        self.circle_point(point.x(), &c, &s, None)
    }

    /// Point on the circle of radius `radius` around `x` at local `angle`.
    pub fn point_on_circle(&self, x: &TreeAddress, angle: f64, radius: f64) -> Result<MinkowskiPoint, HyperbolicError> {
        let p = self.params.precision_bits;
        let (c, s) = (BigFloat::from_f64(angle.cos(), p), BigFloat::from_f64(angle.sin(), p));
        self.circle_point(x, &c, &s, Some(radius))
    }

    /// Line perpendicular to local direction `(c, s)` at the distance whose
    /// `cosh`, `sinh` are `ch`, `sh`.
    fn perpendicular_line(&self, frame: &NodeFrame, c: &BigFloat, s: &BigFloat, ch: &BigFloat, sh: &BigFloat) -> IdealLine {
        let p = self.params.precision_bits;
        // local endpoints before rotation: (ch, sh, ±1); rotate by (c, s)
        let end = |sign: i8| {
            let w = BigFloat::from_i8(sign, p);
            let u = c.mul(sh, p, RM).sub(&s.mul(&w, p, RM), p, RM);
            let v = s.mul(sh, p, RM).add(&c.mul(&w, p, RM), p, RM);
            frame.transform.apply(&[ch.clone(), u, v], p)
        };
        IdealLine { a: end(1), b: end(-1) }
    }

    fn cosh_sinh(&self, dist: &BigFloat) -> (BigFloat, BigFloat) {
        let p = self.params.precision_bits;
        let mut cc = Consts::new().expect("constant cache");
        (dist.cosh(p, RM, &mut cc), dist.sinh(p, RM, &mut cc))
    }

    /// Buffer zone of the edge from `child`'s parent to `child`.
    pub fn buffer_zone(&self, child: &TreeAddress) -> Result<BufferZone, HyperbolicError> {
        let parent_addr = child.parent().ok_or_else(|| HyperbolicError::MissingFrame("parent of ε".into()))?;
        let parent = self.frame(&parent_addr)?;
        self.frame(child)?;
        let p = self.params.precision_bits;
        let (c, s) = &self.directions[parent.side.is_right_like() as usize][child.last_bit().unwrap() as usize];
        let far_dist = self.d7.add(&BigFloat::from_f64(self.params.d, p), p, RM);
        let (ch_n, sh_n) = self.cosh_sinh(&self.d7);
        let (ch_f, sh_f) = self.cosh_sinh(&far_dist);
        Ok(BufferZone {
            child: child.clone(),
            near: self.perpendicular_line(parent, c, s, &ch_n, &sh_n),
            far: self.perpendicular_line(parent, c, s, &ch_f, &sh_f),
        })
    }

    /// The seven sides of the ideal heptagon centered at `a`, starting with
    /// the side facing the parent.
    pub fn heptagon(&self, a: &TreeAddress) -> Result<Vec<IdealLine>, HyperbolicError> {
        let frame = self.frame(a)?;
        let p = self.params.precision_bits;
        let ideal: Vec<[BigFloat; 3]> = self
            .heptagon_vertices
            .iter()
            .map(|(c, s)| frame.transform.apply(&[BigFloat::from_u8(1, p), c.clone(), s.clone()], p))
            .collect();
        Ok((0..7).map(|k| IdealLine { a: ideal[k].clone(), b: ideal[(k + 1) % 7].clone() }).collect())
    }
}

/// Klein-model coordinates `(u/t, v/t)` at full precision.
fn klein(x: &[BigFloat; 3], p: usize) -> [BigFloat; 2] {
    [x[1].div(&x[0], p, RM), x[2].div(&x[0], p, RM)]
}

/// Orientation of `q` against the oriented line `a → b`, in Klein
/// coordinates: `1`, `-1`, or `0` within `2^(−p/2)`.
fn orientation(line: &IdealLine, q: &[BigFloat; 3], p: usize) -> i8 {
    let ([ax, ay], [bx, by], [qx, qy]) = (klein(&line.a, p), klein(&line.b, p), klein(q, p));
    let (dx, dy) = (bx.sub(&ax, p, RM), by.sub(&ay, p, RM));
    let (ex, ey) = (qx.sub(&ax, p, RM), qy.sub(&ay, p, RM));
    let det = dx.mul(&ey, p, RM).sub(&dy.mul(&ex, p, RM), p, RM);
    let mut tolerance = BigFloat::from_u8(1, p);
    tolerance.set_exponent(-(p as i32 / 2));
    if det.abs().cmp(&tolerance).is_some_and(|o| o <= 0) {
        0
    } else if det.is_negative() {
        -1
    } else {
        1
    }
}

fn endpoints(z: &BufferZone) -> [&[BigFloat; 3]; 4] {
    [&z.near.a, &z.near.b, &z.far.a, &z.far.b]
}

/// Whether one boundary line of `a` has all of `b` on its outer side.
fn separated_by(a: &BufferZone, b: &BufferZone, p: usize) -> bool {
    for (line, inner) in [(&a.near, &a.far.a), (&a.far, &a.near.a)] {
        let inside = orientation(line, inner, p);
        let sides: Vec<i8> = endpoints(b).iter().map(|q| orientation(line, q, p)).collect();
        if sides.iter().all(|&s| s != inside) && sides.iter().any(|&s| s != 0) {
            return true;
        }
    }
    false
}

/// True when a boundary line of one zone leaves the other zone entirely on
/// its far side. Zones are convex hulls of their four ideal endpoints, so
/// this certifies disjoint interiors; shared ideal endpoints are allowed.
pub fn zones_disjoint(a: &BufferZone, b: &BufferZone, precision: usize) -> bool {
    separated_by(a, b, precision) || separated_by(b, a, precision)
}
