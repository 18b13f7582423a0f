//! Closure oracle in the unit-quaternion model of the 3-sphere.
//!
//! Every oriented great circle arc is a segment of a Hopf fibre, so an arc
//! with Hopf direction `v` (an imaginary unit quaternion) and length `L` acts
//! on its start point by the rotor `exp(L v) = cos L + sin L v`. A polygon
//! closes exactly when the ordered product of its rotors is the identity.
//!
//! Which side the rotors multiply on, the traversal order and the global
//! sign of the fields are conventions. They are fixed once by [`calibrate`]
//! against explicit right-angled Lawson quadrilaterals. The eight candidates
//! split into two chirality classes whose members give identical closure
//! verdicts, so calibration selects a class and returns its canonical member.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Mul, Neg};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-norm tolerance for Hopf directions.
pub const UNIT_TOL: f64 = 1e-12;
/// Closure defect below which a polygon counts as closed.
pub const CLOSURE_TOL: f64 = 1e-9;

/// A quaternion `w + x i + y j + z k`; points of S³ and rotors alike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Euclidean (chordal) distance in R⁴.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let d = Quaternion::new(
            self.w - other.w,
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
        );
        d.norm()
    }

    /// Great-circle distance on S³, in [0, π].
    pub fn geodesic_distance(&self, other: &Self) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Quaternion) -> Quaternion {
        let (a, b, c, d) = (self.w, self.x, self.y, self.z);
        let (e, f, g, h) = (rhs.w, rhs.x, rhs.y, rhs.z);
        Quaternion {
            w: a * e - b * f - c * g - d * h,
            x: a * f + b * e + c * h - d * g,
            y: a * g - b * h + c * e + d * f,
            z: a * h + b * g - c * f + d * e,
        }
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Unit vector `a A + b B + c C` over the fixed tangent basis (A, B, C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct HopfDirection {
    a: f64,
    b: f64,
    c: f64,
}

impl HopfDirection {
    pub const A: HopfDirection = HopfDirection {
        a: 1.0,
        b: 0.0,
        c: 0.0,
    };
    pub const B: HopfDirection = HopfDirection {
        a: 0.0,
        b: 1.0,
        c: 0.0,
    };
    pub const C: HopfDirection = HopfDirection {
        a: 0.0,
        b: 0.0,
        c: 1.0,
    };

    /// Checked constructor; the coefficients must already be unit length.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let norm2 = a * a + b * b + c * c;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidField(a, b, c));
        }
        Ok(Self { a, b, c })
    }

    /// Rescales a non-zero vector onto the unit sphere.
    pub fn normalized(a: f64, b: f64, c: f64) -> Result<Self> {
        let n = (a * a + b * b + c * c).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidField(a, b, c));
        }
        Ok(Self {
            a: a / n,
            b: b / n,
            c: c / n,
        })
    }

    /// `cos θ · u + sin θ · v` for orthonormal `u`, `v`; unit by construction.
    pub fn rotated(u: HopfDirection, v: HopfDirection, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            a: c * u.a + s * v.a,
            b: c * u.b + s * v.b,
            c: c * u.c + s * v.c,
        }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c
    }

    /// Angle between the two fields, in [0, π].
    pub fn angle_to(&self, other: &Self) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn is_parallel_to(&self, other: &Self) -> bool {
        let [a1, b1, c1] = self.coefficients();
        let [a2, b2, c2] = other.coefficients();
        let cross2 =
            (b1 * c2 - c1 * b2).powi(2) + (c1 * a2 - a1 * c2).powi(2) + (a1 * b2 - b1 * a2).powi(2);
        cross2.sqrt() < 1e-12
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// The direction as an imaginary quaternion.
    pub fn as_quaternion(&self) -> Quaternion {
        Quaternion::new(0.0, self.a, self.b, self.c)
    }
}

impl Neg for HopfDirection {
    type Output = HopfDirection;

    fn neg(self) -> HopfDirection {
        HopfDirection {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }
}

impl TryFrom<[f64; 3]> for HopfDirection {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        HopfDirection::new(v[0], v[1], v[2])
    }
}

impl From<HopfDirection> for [f64; 3] {
    fn from(v: HopfDirection) -> Self {
        v.coefficients()
    }
}

/// One arc of a contour: its Hopf field and its (unreduced) length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArc")]
pub struct ArcSpec {
    pub field: HopfDirection,
    pub length: f64,
}

#[derive(Deserialize)]
struct RawArc {
    field: HopfDirection,
    length: f64,
}

impl TryFrom<RawArc> for ArcSpec {
    type Error = Error;

    fn try_from(raw: RawArc) -> Result<Self> {
        ArcSpec::new(raw.field, raw.length)
    }
}

impl ArcSpec {
    pub fn new(field: HopfDirection, length: f64) -> Result<Self> {
        if !length.is_finite() || length < 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "arc length {length} must be finite and non-negative"
            )));
        }
        Ok(Self { field, length })
    }
}

/// Ordered arcs of a polygon; consecutive fields are never parallel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon")]
pub struct PolygonSpec {
    arcs: Vec<ArcSpec>,
}

#[derive(Deserialize)]
struct RawPolygon {
    arcs: Vec<ArcSpec>,
}

impl TryFrom<RawPolygon> for PolygonSpec {
    type Error = Error;

    fn try_from(raw: RawPolygon) -> Result<Self> {
        PolygonSpec::new(raw.arcs)
    }
}

impl PolygonSpec {
    pub fn new(arcs: Vec<ArcSpec>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidPolygon("polygon has no arcs".into()));
        }
        for (k, pair) in arcs.windows(2).enumerate() {
            if pair[0].field.is_parallel_to(&pair[1].field) {
                return Err(Error::InvalidPolygon(format!(
                    "arcs {k} and {} have parallel Hopf fields",
                    k + 1
                )));
            }
        }
        Ok(Self { arcs })
    }

    /// Builds a polygon from `(field, length)` pairs.
    pub fn from_pairs(pairs: &[(HopfDirection, f64)]) -> Result<Self> {
        let arcs = pairs
            .iter()
            .map(|&(field, length)| ArcSpec::new(field, length))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arcs)
    }

    pub fn arcs(&self) -> &[ArcSpec] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Same polygon with the arc list rotated left by `k`.
    pub fn rotated(&self, k: usize) -> Result<Self> {
        let mut arcs = self.arcs.clone();
        let n = arcs.len();
        arcs.rotate_left(k % n);
        Self::new(arcs)
    }

    /// Copy with `delta` added to the length of arc `index`.
    pub fn with_extended_arc(&self, index: usize, delta: f64) -> Result<Self> {
        let mut arcs = self.arcs.clone();
        let arc = arcs
            .get_mut(index)
            .ok_or_else(|| Error::InvalidPolygon(format!("no arc {index}")))?;
        *arc = ArcSpec::new(arc.field, arc.length + delta)?;
        Self::new(arcs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    LeftMultiplication,
    RightMultiplication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Forward,
    Reversed,
}

/// Quaternion-model conventions for turning arcs into rotors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConventionParams {
    pub side: Side,
    pub order: Order,
    /// +1 or −1.
    pub field_sign: i8,
}

impl ConventionParams {
    /// All eight candidates, in canonical preference order: forward before
    /// reversed, positive sign before negative, left before right.
    pub fn candidates() -> [ConventionParams; 8] {
        let mut out = [ConventionParams {
            side: Side::LeftMultiplication,
            order: Order::Forward,
            field_sign: 1,
        }; 8];
        let mut k = 0;
        for order in [Order::Forward, Order::Reversed] {
            for field_sign in [1, -1] {
                for side in [Side::LeftMultiplication, Side::RightMultiplication] {
                    out[k] = ConventionParams {
                        side,
                        order,
                        field_sign,
                    };
                    k += 1;
                }
            }
        }
        out
    }

    /// Handedness of the convention. Flipping any one of side, order or
    /// sign maps the closure product to its inverse or its quaternion
    /// reversal, so candidates with equal chirality agree on closure.
    pub fn chirality(&self) -> i8 {
        let side = match self.side {
            Side::LeftMultiplication => 1,
            Side::RightMultiplication => -1,
        };
        let order = match self.order {
            Order::Forward => 1,
            Order::Reversed => -1,
        };
        side * order * self.field_sign.signum()
    }

    fn ordered<'a>(&self, polygon: &'a PolygonSpec) -> Box<dyn Iterator<Item = &'a ArcSpec> + 'a> {
        match self.order {
            Order::Forward => Box::new(polygon.arcs().iter()),
            Order::Reversed => Box::new(polygon.arcs().iter().rev()),
        }
    }

    fn apply(&self, rotor: Quaternion, point: Quaternion) -> Quaternion {
        match self.side {
            Side::LeftMultiplication => rotor * point,
            Side::RightMultiplication => point * rotor,
        }
    }

    fn signed(&self, field: &HopfDirection) -> HopfDirection {
        if self.field_sign < 0 {
            -*field
        } else {
            *field
        }
    }
}

impl fmt::Display for ConventionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::LeftMultiplication => "left",
            Side::RightMultiplication => "right",
        };
        let order = match self.order {
            Order::Forward => "forward",
            Order::Reversed => "reversed",
        };
        write!(f, "{side}/{order}/{:+}", self.field_sign)
    }
}

/// Hopf-flow rotor `cos L + sin L · v`, with `L` folded into [0, 2π).
pub fn rotor(field: &HopfDirection, length: f64) -> Result<Quaternion> {
    if (field.norm() - 1.0).abs() > UNIT_TOL {
        let [a, b, c] = field.coefficients();
        return Err(Error::InvalidField(a, b, c));
    }
    let folded = length.rem_euclid(TAU);
    let (s, c) = folded.sin_cos();
    let [a, b, cc] = field.coefficients();
    Ok(Quaternion::new(c, s * a, s * b, s * cc))
}

/// Ordered rotor product of the polygon under `conventions`.
pub fn closure_product(
    polygon: &PolygonSpec,
    conventions: &ConventionParams,
) -> Result<Quaternion> {
    if polygon.is_empty() {
        return Err(Error::InvalidPolygon("polygon has no arcs".into()));
    }
    let mut product = Quaternion::IDENTITY;
    for arc in conventions.ordered(polygon) {
        let r = rotor(&conventions.signed(&arc.field), arc.length)?;
        product = conventions.apply(r, product);
    }
    Ok(product)
}

/// Chordal distance of the rotor product from the identity.
pub fn closure_defect(polygon: &PolygonSpec, conventions: &ConventionParams) -> Result<f64> {
    Ok(closure_product(polygon, conventions)?.chordal_distance(&Quaternion::IDENTITY))
}

/// Vertices visited from `start`; the result has one more entry than arcs.
pub fn walk(
    polygon: &PolygonSpec,
    start: Quaternion,
    conventions: &ConventionParams,
) -> Result<Vec<Quaternion>> {
    let n = start.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidPoint(n));
    }
    let mut vertices = Vec::with_capacity(polygon.len() + 1);
    vertices.push(start);
    let mut p = start;
    for arc in conventions.ordered(polygon) {
        let r = rotor(&conventions.signed(&arc.field), arc.length)?;
        p = conventions.apply(r, p);
        vertices.push(p);
    }
    Ok(vertices)
}

/// Selects the convention under which every reference polygon closes.
///
/// Fails when no candidate survives, or when survivors of both chiralities
/// remain (the references cannot tell the two handednesses apart).
pub fn calibrate(
    candidates: &[ConventionParams],
    references: &[PolygonSpec],
) -> Result<ConventionParams> {
    if references.is_empty() {
        return Err(Error::CalibrationFailure(
            "reference family is empty".into(),
        ));
    }
    let survivors = surviving_candidates(candidates, references)?;
    let Some(first) = survivors.first().copied() else {
        return Err(Error::CalibrationFailure(
            "no convention closes every reference polygon".into(),
        ));
    };
    if survivors.iter().any(|c| c.chirality() != first.chirality()) {
        let names: Vec<String> = survivors.iter().map(|c| c.to_string()).collect();
        return Err(Error::CalibrationFailure(format!(
            "references admit both chiralities: {}",
            names.join(", ")
        )));
    }
    Ok(first)
}

/// Every candidate under which all reference polygons close.
pub fn surviving_candidates(
    candidates: &[ConventionParams],
    references: &[PolygonSpec],
) -> Result<Vec<ConventionParams>> {
    let mut out = Vec::new();
    for candidate in candidates {
        let mut closes = true;
        for polygon in references {
            if closure_defect(polygon, candidate)? >= CLOSURE_TOL {
                closes = false;
                break;
            }
        }
        if closes {
            out.push(*candidate);
        }
    }
    Ok(out)
}

/// A calibrated closure checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    conventions: ConventionParams,
}

impl Oracle {
    pub fn calibrate(references: &[PolygonSpec]) -> Result<Self> {
        let conventions = calibrate(&ConventionParams::candidates(), references)?;
        Ok(Self { conventions })
    }

    pub fn conventions(&self) -> ConventionParams {
        self.conventions
    }

    pub fn closure_defect(&self, polygon: &PolygonSpec) -> Result<f64> {
        closure_defect(polygon, &self.conventions)
    }

    pub fn walk(&self, polygon: &PolygonSpec, start: Quaternion) -> Result<Vec<Quaternion>> {
        walk(polygon, start, &self.conventions)
    }
}

static CALIBRATED: OnceLock<std::result::Result<Oracle, Error>> = OnceLock::new();

/// The process-wide oracle, calibrated once against the right-angled
/// Lawson quadrilateral families.
pub fn calibrated() -> Result<&'static Oracle> {
    CALIBRATED
        .get_or_init(|| Oracle::calibrate(&crate::lawson::calibration_references()?))
        .as_ref()
        .map_err(Clone::clone)
}
