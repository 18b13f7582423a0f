//! Lawson quadrilaterals Γ(l, t, r, s; β).
//!
//! Great-circle quadrilaterals with Hopf fields −A, C, sin β A − cos β C, −B
//! carrying the lengths l, t, r, s in that order. Three vertices are right
//! angles; the angle β sits between the t- and r-arcs.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::s3_oracle::{HopfDirection, PolygonSpec};

/// Residual bound for freshly constructed quadrilaterals.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Matching tolerance used by [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-8;

/// |r − π/4| below which the closed-form family switches to direct assignment.
const MIDPOINT_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuad")]
pub struct LawsonQuad {
    pub l: f64,
    pub t: f64,
    pub r: f64,
    pub s: f64,
    pub beta: f64,
}

#[derive(Deserialize)]
struct RawQuad {
    l: f64,
    t: f64,
    r: f64,
    s: f64,
    beta: f64,
}

impl TryFrom<RawQuad> for LawsonQuad {
    type Error = Error;

    fn try_from(q: RawQuad) -> Result<Self> {
        LawsonQuad::new(q.l, q.t, q.r, q.s, q.beta)
    }
}

impl LawsonQuad {
    /// Range-checked constructor: positive lengths, 0 < l ≤ π/4, 0 < β < 2π.
    pub fn new(l: f64, t: f64, r: f64, s: f64, beta: f64) -> Result<Self> {
        let all = [l, t, r, s, beta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(domain("non-finite quadrilateral entry"));
        }
        if l <= 0.0 || l > FRAC_PI_4 + 1e-12 {
            return Err(domain(format!("l = {l} outside (0, π/4]")));
        }
        if t <= 0.0 || r <= 0.0 || s <= 0.0 {
            return Err(domain(format!(
                "lengths must be positive (t = {t}, r = {r}, s = {s})"
            )));
        }
        if beta <= 0.0 || beta >= TAU {
            return Err(domain(format!("beta = {beta} outside (0, 2π)")));
        }
        Ok(Self { l, t, r, s, beta })
    }

    pub fn residuals(&self) -> [f64; 4] {
        residuals(self)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// The Hopf field of the r-arc, sin β A − cos β C.
    pub fn diagonal_field(&self) -> HopfDirection {
        HopfDirection::rotated(-HopfDirection::C, HopfDirection::A, self.beta)
    }

    /// The quadrilateral as a closed polygon for the S³ oracle.
    pub fn polygon(&self) -> Result<PolygonSpec> {
        PolygonSpec::from_pairs(&[
            (-HopfDirection::A, self.l),
            (HopfDirection::C, self.t),
            (self.diagonal_field(), self.r),
            (-HopfDirection::B, self.s),
        ])
    }
}

/// The four cosine-law residuals; all vanish exactly on Lawson quadrilaterals.
pub fn residuals(q: &LawsonQuad) -> [f64; 4] {
    let (sl, cl) = q.l.sin_cos();
    let (st, ct) = q.t.sin_cos();
    let (sr, cr) = q.r.sin_cos();
    let (ss, cs) = q.s.sin_cos();
    let cb = q.beta.cos();
    [
        cs * cr - cl * ct,
        ss * cr - sl * st,
        cs * cl - cr * ct - cb * sr * st,
        ss * sl - cr * st + cb * sr * ct,
    ]
}

/// Acute-angle family, parametrized by r: 0 < β < π/2, 0 < r < π/2.
pub fn from_r(beta: f64, r: f64) -> Result<LawsonQuad> {
    if !(beta > 0.0 && beta < FRAC_PI_2) {
        return Err(domain(format!("beta = {beta} outside (0, π/2)")));
    }
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(domain(format!("r = {r} outside (0, π/2)")));
    }
    if (r - FRAC_PI_4).abs() <= MIDPOINT_EPS {
        return LawsonQuad::new(0.5 * beta, FRAC_PI_4, r, 0.5 * beta, beta);
    }
    let (s2r, c2r) = (2.0 * r).sin_cos();
    let (sb, cb) = beta.sin_cos();
    // sin 2l = sin 2r sin β and cos 2l = sqrt(cos²β sin²2r + cos²2r).
    let l = 0.5 * (s2r * sb).atan2((cb * cb * s2r * s2r + c2r * c2r).sqrt());
    // tan 2t = cos β tan 2r, with 2t on the same side of π/2 as 2r.
    let t = 0.5 * (cb * s2r).atan2(c2r);
    let s = (l.tan() * t.tan()).atan();
    LawsonQuad::new(l, t, r, s, beta)
}

/// Obtuse-angle family: π/2 < β < π, via (s, t) ↦ (π − s, π − t).
pub fn from_r_obtuse(beta: f64, r: f64) -> Result<LawsonQuad> {
    if !(beta > FRAC_PI_2 && beta < PI) {
        return Err(domain(format!("beta = {beta} outside (π/2, π)")));
    }
    let q = from_r(PI - beta, r)?;
    LawsonQuad::new(q.l, PI - q.t, q.r, PI - q.s, beta)
}

/// The three right-angled families with β = π/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RightAngledKind {
    /// Γ(l, π/2, π/2 − l, π/2): neck and bulge circles a quarter period apart.
    Complementary,
    /// Γ(l, π, l, π): two equal circles half a period apart.
    Equal,
    /// Γ(π/4, s, π/4, s): the cylinder, any spacing s.
    Cylindrical,
}

/// Right-angled quadrilateral; `param` is l for the first two kinds, s for
/// the cylindrical one.
pub fn right_angled(kind: RightAngledKind, param: f64) -> Result<LawsonQuad> {
    match kind {
        RightAngledKind::Complementary | RightAngledKind::Equal => {
            if !(param > 0.0 && param <= FRAC_PI_4) {
                return Err(domain(format!("l = {param} outside (0, π/4]")));
            }
        }
        RightAngledKind::Cylindrical => {
            if !(param > 0.0 && param.is_finite()) {
                return Err(domain(format!("s = {param} must be positive")));
            }
        }
    }
    match kind {
        RightAngledKind::Complementary => {
            LawsonQuad::new(param, FRAC_PI_2, FRAC_PI_2 - param, FRAC_PI_2, FRAC_PI_2)
        }
        RightAngledKind::Equal => LawsonQuad::new(param, PI, param, PI, FRAC_PI_2),
        RightAngledKind::Cylindrical => {
            LawsonQuad::new(FRAC_PI_4, param, FRAC_PI_4, param, FRAC_PI_2)
        }
    }
}

/// The explicit right-angled polygons used to calibrate the S³ oracle.
pub fn calibration_references() -> Result<Vec<PolygonSpec>> {
    let params = [PI / 16.0, PI / 8.0, PI / 4.0];
    let mut out = Vec::new();
    for kind in [
        RightAngledKind::Complementary,
        RightAngledKind::Equal,
        RightAngledKind::Cylindrical,
    ] {
        for &p in &params {
            out.push(right_angled(kind, p)?.polygon()?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    R,
    S,
    T,
}

/// Length and angle substitutions that map Lawson quadrilaterals to
/// Lawson quadrilaterals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubstitutionStep {
    /// Add 2πn to one of r, s, t.
    #[serde(rename = "add_2pi")]
    Add2Pi { edge: Edge, n: u32 },
    /// (s, t) ↦ (s + π, t + π).
    PairPiSt,
    /// (r, t) ↦ (r + π, t + π).
    PairPiRt,
    /// (r, s) ↦ (r + π, s + π).
    PairPiRs,
    /// (r, β) ↦ (2π − r, β + π); lands in π < β < 2π.
    ReverseR,
    /// (r, s, β) ↦ (π − r, s + π, β + π); lands in π < β < 2π.
    ReverseRAntipodal,
    /// (s, t, β) ↦ (π − s, π − t, π − β).
    ReflectBeta,
}

pub fn apply_substitution(q: &LawsonQuad, step: SubstitutionStep) -> Result<LawsonQuad> {
    let LawsonQuad {
        l,
        mut t,
        mut r,
        mut s,
        mut beta,
    } = *q;
    match step {
        SubstitutionStep::Add2Pi { edge, n } => {
            let d = TAU * f64::from(n);
            match edge {
                Edge::R => r += d,
                Edge::S => s += d,
                Edge::T => t += d,
            }
        }
        SubstitutionStep::PairPiSt => {
            s += PI;
            t += PI;
        }
        SubstitutionStep::PairPiRt => {
            r += PI;
            t += PI;
        }
        SubstitutionStep::PairPiRs => {
            r += PI;
            s += PI;
        }
        SubstitutionStep::ReverseR | SubstitutionStep::ReverseRAntipodal => {
            if !(beta > 0.0 && beta < PI) {
                return Err(Error::InvalidSubstitution(format!(
                    "{step:?} needs 0 < β < π, got {beta}"
                )));
            }
            beta += PI;
            if step == SubstitutionStep::ReverseR {
                r = TAU - r;
            } else {
                r = PI - r;
                s += PI;
            }
        }
        SubstitutionStep::ReflectBeta => {
            s = PI - s;
            t = PI - t;
            beta = PI - beta;
        }
    }
    LawsonQuad::new(l, t, r, s, beta).map_err(|e| {
        Error::InvalidSubstitution(format!("{step:?} gives an invalid quadrilateral: {e}"))
    })
}

/// A base quadrilateral family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BaseFamily {
    Acute { beta: f64, r: f64 },
    Obtuse { beta: f64, r: f64 },
    RightComplementary { l: f64 },
    RightEqual { l: f64 },
    RightCylindrical { s: f64 },
}

impl BaseFamily {
    pub fn quadrilateral(&self) -> Result<LawsonQuad> {
        match *self {
            BaseFamily::Acute { beta, r } => from_r(beta, r),
            BaseFamily::Obtuse { beta, r } => from_r_obtuse(beta, r),
            BaseFamily::RightComplementary { l } => right_angled(RightAngledKind::Complementary, l),
            BaseFamily::RightEqual { l } => right_angled(RightAngledKind::Equal, l),
            BaseFamily::RightCylindrical { s } => right_angled(RightAngledKind::Cylindrical, s),
        }
    }
}

/// Result of [`classify`]: applying `steps` in order to `base` gives back the
/// classified quadrilateral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub base: BaseFamily,
    pub steps: Vec<SubstitutionStep>,
}

impl Classification {
    pub fn reconstruct(&self) -> Result<LawsonQuad> {
        let mut q = self.base.quadrilateral()?;
        for &step in &self.steps {
            q = apply_substitution(&q, step)?;
        }
        Ok(q)
    }
}

/// Representative of `x` modulo 2π in (0, 2π], with the number of periods removed.
fn reduce_2pi(x: f64) -> (f64, i64) {
    let n = (x / TAU).ceil() as i64 - 1;
    (x - TAU * n as f64, n)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CLASSIFY_TOL
}

fn match_base(l: f64, t: f64, r: f64, s: f64, beta: f64) -> Option<BaseFamily> {
    if (beta - FRAC_PI_2).abs() <= 1e-12 {
        if close(t, FRAC_PI_2) && close(s, FRAC_PI_2) && close(r, FRAC_PI_2 - l) {
            return Some(BaseFamily::RightComplementary { l });
        }
        if close(t, PI) && close(s, PI) && close(r, l) {
            return Some(BaseFamily::RightEqual { l });
        }
        if close(l, FRAC_PI_4) && close(r, FRAC_PI_4) && close(s, t) && s <= PI + CLASSIFY_TOL {
            return Some(BaseFamily::RightCylindrical { s });
        }
        return None;
    }
    if !(r > 0.0 && r < FRAC_PI_2) {
        return None;
    }
    let base = if beta < FRAC_PI_2 {
        BaseFamily::Acute { beta, r }
    } else if beta < PI {
        BaseFamily::Obtuse { beta, r }
    } else {
        return None;
    };
    let q = base.quadrilateral().ok()?;
    (close(q.l, l) && close(q.t, t) && close(q.s, s)).then_some(base)
}

/// Reduces `q` by the substitution group and identifies its base family.
pub fn classify(q: &LawsonQuad) -> Result<Classification> {
    let not_lawson = |why: &str| Error::NotALawsonQuadrilateral(format!("{q:?}: {why}"));
    if q.max_residual() > CLASSIFY_TOL {
        return Err(not_lawson("cosine-law residuals do not vanish"));
    }
    if (q.beta - PI).abs() <= 1e-12 {
        return Err(not_lawson("no quadrilateral has β = π"));
    }

    // Steps that must run after the reduced (β < π) quadrilateral is rebuilt.
    let mut tail = Vec::new();
    let (mut r, beta) = if q.beta > PI {
        let (r_mod, n) = reduce_2pi(q.r);
        let r_pre = TAU - r_mod;
        if r_pre <= 0.0 {
            return Err(not_lawson("r is a multiple of 2π"));
        }
        tail.push(SubstitutionStep::ReverseR);
        if n > 0 {
            tail.push(SubstitutionStep::Add2Pi {
                edge: Edge::R,
                n: n as u32,
            });
        }
        (r_pre, q.beta - PI)
    } else {
        (q.r, q.beta)
    };
    if r <= 0.0 {
        r = TAU;
    }

    // Pair moves shift an even number of (r, s, t) by π; preference order
    // is none, then (s, t), then (r, t), then (r, s).
    let options: [(Option<SubstitutionStep>, [bool; 3]); 4] = [
        (None, [false, false, false]),
        (Some(SubstitutionStep::PairPiSt), [false, true, true]),
        (Some(SubstitutionStep::PairPiRt), [true, false, true]),
        (Some(SubstitutionStep::PairPiRs), [true, true, false]),
    ];
    for (pair, shifted) in options {
        let lens = [r, q.s, q.t];
        let mut base_lens = [0.0; 3];
        let mut periods = [0i64; 3];
        for k in 0..3 {
            let shift = if shifted[k] { PI } else { 0.0 };
            let (b, _) = reduce_2pi(lens[k] - shift);
            base_lens[k] = b;
            periods[k] = ((lens[k] - shift - b) / TAU).round() as i64;
        }
        if periods.iter().any(|&n| n < 0) {
            continue;
        }
        let [br, bs, bt] = base_lens;
        let Some(base) = match_base(q.l, bt, br, bs, beta) else {
            continue;
        };
        let mut steps = Vec::new();
        steps.extend(pair);
        for (k, edge) in [Edge::R, Edge::S, Edge::T].into_iter().enumerate() {
            if periods[k] > 0 {
                steps.push(SubstitutionStep::Add2Pi {
                    edge,
                    n: periods[k] as u32,
                });
            }
        }
        steps.extend(tail);
        let c = Classification { base, steps };
        let back = c.reconstruct()?;
        let err = [
            back.l - q.l,
            back.t - q.t,
            back.r - q.r,
            back.s - q.s,
            back.beta - q.beta,
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
        if err > CLASSIFY_TOL {
            return Err(not_lawson("reduction does not round-trip"));
        }
        return Ok(c);
    }
    Err(not_lawson("no base family matches after reduction"))
}
