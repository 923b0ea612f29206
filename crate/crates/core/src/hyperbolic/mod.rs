//! Realization of the dyadic embedding in the hyperbolic plane.
//!
//! Each binary-tree node sits at the center of an ideal regular heptagon.
//! The edge to a child crosses a buffer zone of width `D` between one side
//! of the parent's heptagon and the facing side of the child's, so every
//! parent-child pair is `L = D + 2·d7` apart, where `d7` is the heptagon's
//! apothem. A vertex `(x, y)` lands on a small circle around `x`, on the
//! geodesic toward `y`.
//!
//! Coordinates live on the hyperboloid `t² − u² − v² = 1` and use
//! arbitrary-precision floats: a point at depth `k` has coordinates of size
//! about `e^(kL)`, far beyond `f64`.

mod frames;
mod render;

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};

use crate::embed::EmbeddingTable;
use crate::error::HyperbolicError;
use crate::graph::Graph;
use crate::router::{verify_all_pairs, DistanceOracle, VerificationReport, VerifyOptions};

pub use frames::{child_angle, place_frames, place_frames_for, zones_disjoint, BufferZone, FrameMap, IdealLine, NodeFrame};
pub use render::{render_svg, Layers, RenderOptions};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Radius of the circle around each node that carries its vertices.
pub const CIRCLE_RADIUS: f64 = 0.5;

/// Apothem of the ideal regular `n`-gon: `2·artanh((1 − sin(π/n)) / cos(π/n))`.
pub fn polygon_apothem(n: u32) -> f64 {
    let a = PI / n as f64;
    2.0 * ((1.0 - a.sin()) / a.cos()).atanh()
}

/// Apothem of the ideal regular heptagon, about 1.4773.
pub fn heptagon_apothem() -> f64 {
    polygon_apothem(7)
}

/// [`polygon_apothem`] at `precision` bits.
pub fn polygon_apothem_big(n: u32, precision: usize, cc: &mut Consts) -> BigFloat {
    let p = precision;
    let a = cc.pi(p, RM).div(&BigFloat::from_u32(n, p), p, RM);
    let one = BigFloat::from_u8(1, p);
    let x = one.sub(&a.sin(p, RM, cc), p, RM).div(&a.cos(p, RM, cc), p, RM);
    x.atanh(p, RM, cc).mul(&BigFloat::from_u8(2, p), p, RM)
}

/// Buffer width for a table whose deepest address has `max_address_depth`
/// bits: `ceil(2·d7·(2·depth + 2) + 4)`.
pub fn choose_d(max_address_depth: usize) -> f64 {
    (2.0 * heptagon_apothem() * (2 * max_address_depth + 2) as f64 + 4.0).ceil()
}

/// Working precision in bits for points up to `max_address_depth · L` from
/// the origin. Coordinates there reach `2^(1.45·depth·L)`; squared norms and
/// Minkowski products cancel twice that many leading bits, and the norm check
/// tolerates an error of `2^(−p/2)`, hence the factor `4 · 1.45`.
pub fn auto_precision(max_address_depth: usize, edge_length: f64) -> usize {
    (5.8 * max_address_depth as f64 * edge_length).ceil() as usize + 128
}

/// Geometry constants of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicParams {
    /// Buffer zone width.
    pub d: f64,
    pub circle_radius: f64,
    pub precision_bits: usize,
}

impl HyperbolicParams {
    /// Defaults for a table of the given depth, with optional overrides.
    pub fn new(max_address_depth: usize, d: Option<f64>, precision: Option<usize>) -> Result<Self, HyperbolicError> {
        let d = d.unwrap_or_else(|| choose_d(max_address_depth));
        let edge = d + 2.0 * heptagon_apothem();
        let params = HyperbolicParams {
            d,
            circle_radius: CIRCLE_RADIUS,
            precision_bits: precision.unwrap_or_else(|| auto_precision(max_address_depth, edge)),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn for_table(table: &EmbeddingTable) -> Self {
        Self::new(table.max_address_depth(), None, None).expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<(), HyperbolicError> {
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(HyperbolicError::InvalidParameter(format!("buffer width D = {} must be positive", self.d)));
        }
        if !(self.circle_radius > 0.0 && self.circle_radius < heptagon_apothem()) {
            return Err(HyperbolicError::InvalidParameter(format!(
                "circle radius {} must lie in (0, d7)",
                self.circle_radius
            )));
        }
        if self.precision_bits < 64 {
            return Err(HyperbolicError::InvalidParameter(format!(
                "precision of {} bits is below the 64-bit minimum",
                self.precision_bits
            )));
        }
        Ok(())
    }

    pub fn d7(&self) -> f64 {
        heptagon_apothem()
    }

    /// `L = D + 2·d7`.
    pub fn edge_length(&self) -> f64 {
        self.d + 2.0 * heptagon_apothem()
    }
}

/// Nearest `f64`; `±inf` beyond its range, NaN for NaN.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else { return f64::NAN };
    if x.is_zero() {
        return 0.0;
    }
    // value = 0.m × 2^exponent with the top word normalized
    let w = WORD_BIT_SIZE as i32;
    let mut frac = 0.0;
    for (i, &word) in words.iter().rev().take(128 / WORD_BIT_SIZE).enumerate() {
        frac += word as f64 * 2f64.powi(-(w * (i as i32 + 1)));
    }
    let value = frac * 2f64.powi(exponent.clamp(-1100, 1100));
    if sign == Sign::Neg {
        -value
    } else {
        value
    }
}

/// `acosh(x)` in `f64` for any `x ≥ 1`, including values too large for `f64`.
pub fn approx_acosh(x: &BigFloat) -> f64 {
    let Some(e) = x.exponent() else { return f64::NAN };
    if e < 500 {
        return to_f64(x).max(1.0).acosh();
    }
    // acosh x = ln 2x + O(x⁻²): split x = m·2^e with m in [1/2, 1)
    let mut m = x.clone();
    m.set_exponent(0);
    (2.0 * to_f64(&m)).ln() + e as f64 * std::f64::consts::LN_2
}

/// Point of the hyperboloid `t² − u² − v² = 1`, `t > 0`.
#[derive(Debug, Clone)]
pub struct MinkowskiPoint {
    pub t: BigFloat,
    pub u: BigFloat,
    pub v: BigFloat,
}

impl MinkowskiPoint {
    pub fn origin(precision: usize) -> MinkowskiPoint {
        MinkowskiPoint {
            t: BigFloat::from_u8(1, precision),
            u: BigFloat::new(precision),
            v: BigFloat::new(precision),
        }
    }

    /// The point at distance `r` from the origin in direction `angle`.
    pub fn polar(r: f64, angle: f64, precision: usize, cc: &mut Consts) -> MinkowskiPoint {
        let p = precision;
        let (r, a) = (BigFloat::from_f64(r, p), BigFloat::from_f64(angle, p));
        let sh = r.sinh(p, RM, cc);
        MinkowskiPoint {
            t: r.cosh(p, RM, cc),
            u: sh.mul(&a.cos(p, RM, cc), p, RM),
            v: sh.mul(&a.sin(p, RM, cc), p, RM),
        }
    }

    /// Minkowski product `t·t' − u·u' − v·v'`; equals `cosh d` for points on
    /// the hyperboloid.
    pub fn product(&self, other: &MinkowskiPoint, precision: usize) -> BigFloat {
        let p = precision;
        self.t
            .mul(&other.t, p, RM)
            .sub(&self.u.mul(&other.u, p, RM), p, RM)
            .sub(&self.v.mul(&other.v, p, RM), p, RM)
    }

    /// `|t² − u² − v² − 1|`.
    pub fn norm_drift(&self, precision: usize) -> BigFloat {
        self.product(self, precision).sub(&BigFloat::from_u8(1, precision), precision, RM).abs()
    }

    pub fn is_finite(&self) -> bool {
        [&self.t, &self.u, &self.v].iter().all(|x| !x.is_nan() && !x.is_inf())
    }

    /// Poincaré disk coordinates `(u, v) / (1 + t)`.
    pub fn to_poincare(&self, precision: usize) -> (f64, f64) {
        let p = precision;
        let denom = self.t.add(&BigFloat::from_u8(1, p), p, RM);
        (to_f64(&self.u.div(&denom, p, RM)), to_f64(&self.v.div(&denom, p, RM)))
    }
}

/// `cosh` of the hyperbolic distance.
pub fn cosh_distance(p: &MinkowskiPoint, q: &MinkowskiPoint, precision: usize) -> BigFloat {
    p.product(q, precision)
}

/// Hyperbolic distance `acosh(t·t' − u·u' − v·v')`.
///
/// Products below 1 by more than `2^(−precision/2)` mean at least one input
/// is off the hyperboloid.
pub fn hyperbolic_distance(p: &MinkowskiPoint, q: &MinkowskiPoint, precision: usize) -> Result<BigFloat, HyperbolicError> {
    let prec = precision;
    let c = p.product(q, prec);
    let one = BigFloat::from_u8(1, prec);
    let mut tolerance = BigFloat::from_u8(1, prec);
    tolerance.set_exponent(-(prec as i32 / 2) + 1);
    if c.is_nan() || c.add(&tolerance, prec, RM).cmp(&one).is_none_or(|o| o < 0) {
        return Err(HyperbolicError::DomainError);
    }
    if c.cmp(&one).is_some_and(|o| o <= 0) {
        return Ok(BigFloat::new(prec));
    }
    let mut cc = Consts::new().map_err(|_| HyperbolicError::DomainError)?;
    Ok(c.acosh(prec, RM, &mut cc))
}

/// Distances compared through their hyperbolic cosines.
#[derive(Debug, Clone)]
pub struct CoshDistance(pub BigFloat);

impl CoshDistance {
    pub fn to_f64(&self) -> f64 {
        approx_acosh(&self.0)
    }
}

impl PartialEq for CoshDistance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CoshDistance {}

impl PartialOrd for CoshDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoshDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        // oracle points are checked finite, so NaN never reaches here
        self.0.cmp(&other.0).map_or(Ordering::Equal, |o| o.cmp(&0))
    }
}

impl fmt::Display for CoshDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.to_f64())
    }
}

/// Hyperbolic metric over the realized vertex points.
pub struct HyperbolicOracle {
    points: Vec<MinkowskiPoint>,
    precision: usize,
}

impl HyperbolicOracle {
    pub fn new(points: Vec<MinkowskiPoint>, precision: usize) -> Result<Self, HyperbolicError> {
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(HyperbolicError::InvalidParameter(format!("non-finite point {p:?}")));
        }
        Ok(HyperbolicOracle { points, precision })
    }

    /// Places the frames for `table` and realizes every vertex.
    pub fn realize(table: &EmbeddingTable, params: &HyperbolicParams) -> Result<(Self, FrameMap), HyperbolicError> {
        let frames = place_frames(table, params)?;
        let points = table.points().iter().map(|p| frames.vertex_point(p)).collect::<Result<Vec<_>, _>>()?;
        Ok((Self::new(points, params.precision_bits)?, frames))
    }

    pub fn points(&self) -> &[MinkowskiPoint] {
        &self.points
    }
}

impl DistanceOracle for HyperbolicOracle {
    type Distance = CoshDistance;

    fn vertex_count(&self) -> usize {
        self.points.len()
    }

    fn distance(&self, v: usize, t: usize) -> CoshDistance {
        CoshDistance(self.points[v].product(&self.points[t], self.precision))
    }
}

/// All-pairs greedy check under the hyperbolic metric.
pub fn verify_hyperbolic(
    table: &EmbeddingTable,
    g: &Graph,
    params: &HyperbolicParams,
    options: &VerifyOptions,
) -> Result<VerificationReport, HyperbolicError> {
    let (oracle, _) = HyperbolicOracle::realize(table, params)?;
    Ok(verify_all_pairs(g, &oracle, options))
}
