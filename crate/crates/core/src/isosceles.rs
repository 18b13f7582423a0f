//! Isosceles triunduloid contours.
//!
//! A truncated isosceles pentagon Γ(b, r, s − b, l, t) with arm angle α is
//! glued from a Lawson quadrilateral with angle β = π/2 − α + 2b and a
//! Clifford rectangle Γ_C(b, r). Balancing fixes l as a function of (α, r),
//! and closure then leaves the zero set of
//!
//! f(α, r, b) = sin²(α − 2b) sin²2r + cos²2r − sin²(√(π²/4 − 2 cos α · r(π − r))).
//!
//! For 0 < r < R(α) the zero set has two branches b1 < α/2 < b2 = α − b1,
//! which meet on the axis r = R(α). Together they form a disk D.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balancing;
use crate::bisect::bisect;
use crate::error::{domain, Error, Result};
use crate::lawson::{from_r, from_r_obtuse, right_angled, LawsonQuad, RightAngledKind};
use crate::s3_oracle::{calibrated, HopfDirection, PolygonSpec, CLOSURE_TOL};

/// Residual bound on f for solved branch points.
pub const ROOT_TOL: f64 = 1e-12;
/// Inward nudge of the b bracket.
const BRACKET_NUDGE: f64 = 1e-13;
/// Slack when testing r against R(α) or r_max(α).
const BOUND_EPS: f64 = 1e-12;
/// Maximum chart distance between consecutive loop points.
pub const MONODROMY_STEP: f64 = 0.05;
/// Minimum length kept on the (s − b)-arc by the default extension.
pub const EXTENSION_MARGIN: f64 = 0.1;

/// α at the distinguished point σ = (arccos(2/3), π/4).
pub fn alpha_sigma() -> f64 {
    (2.0_f64 / 3.0).acos()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < FRAC_PI_2 {
        Ok(())
    } else {
        Err(domain(format!("alpha = {alpha} outside (0, π/2)")))
    }
}

/// Largest r for which balancing admits a real l.
pub fn r_max(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha >= FRAC_PI_3 {
        return Ok(FRAC_PI_2);
    }
    let x = 1.0 - 1.0 / (2.0 * alpha.cos());
    Ok(FRAC_PI_2 * (1.0 - x.max(0.0).sqrt()))
}

/// R(α) = π(1 − cos α)/(2 − cos α), the edge of the zero set of f.
pub fn r_bound(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let c = alpha.cos();
    Ok(PI * (1.0 - c) / (2.0 - c))
}

fn check_r_max(alpha: f64, r: f64) -> Result<()> {
    let rm = r_max(alpha)?;
    if !(r >= 0.0 && r <= rm + BOUND_EPS) {
        return Err(domain(format!("r = {r} outside [0, r_max(α) = {rm}]")));
    }
    Ok(())
}

pub fn f(alpha: f64, r: f64, b: f64) -> Result<f64> {
    check_r_max(alpha, r)?;
    let radicand = (PI * PI / 4.0 - 2.0 * alpha.cos() * r * (PI - r)).max(0.0);
    let (s2r, c2r) = (2.0 * r).sin_cos();
    Ok((alpha - 2.0 * b).sin().powi(2) * s2r * s2r + c2r * c2r - radicand.sqrt().sin().powi(2))
}

/// ∂f/∂b = −2 sin(2α − 4b) sin²2r.
pub fn df_db(alpha: f64, r: f64, b: f64) -> f64 {
    -2.0 * (2.0 * alpha - 4.0 * b).sin() * (2.0 * r).sin().powi(2)
}

/// Neck length l of the stem, solving l(π − 2l) = cos α · r(π − r).
pub fn balance_l(alpha: f64, r: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if r <= 0.0 {
        return Err(domain(format!("r = {r} must be positive")));
    }
    check_r_max(alpha, r)?;
    let c = alpha.cos() * r * (PI - r);
    let radicand = (PI * PI / 16.0 - 0.5 * c).max(0.0);
    Ok((0.5 * c) / (FRAC_PI_4 + radicand.sqrt()))
}

fn check_interior(alpha: f64, r: f64) -> Result<Option<f64>> {
    check_alpha(alpha)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain(format!("r = {r} must be positive")));
    }
    let big_r = r_bound(alpha)?;
    if (r - big_r).abs() <= 4.0 * f64::EPSILON * big_r {
        return Ok(Some(0.5 * alpha));
    }
    if r > big_r {
        return Err(Error::NoInteriorRoot { r, r_bound: big_r });
    }
    Ok(None)
}

/// The root b1 ∈ (α/2 − π/4, α/2] of f(α, r, ·).
pub fn solve_b1(alpha: f64, r: f64) -> Result<f64> {
    if let Some(b) = check_interior(alpha, r)? {
        return Ok(b);
    }
    let l = balance_l(alpha, r)?;
    // f / sin²2r has the same sign and root but stays well scaled as r → 0.
    let s2r2 = (2.0 * r).sin().powi(2);
    let gap = (2.0 * r + 2.0 * l).sin() * (2.0 * r - 2.0 * l).sin();
    let g = |b: f64| (alpha - 2.0 * b).sin().powi(2) - gap / s2r2;
    let (lo, hi) = (0.5 * alpha - FRAC_PI_4, 0.5 * alpha);
    let (mut a, mut z) = (lo + BRACKET_NUDGE, hi - BRACKET_NUDGE);
    if !(g(a) > 0.0 && g(z) < 0.0) {
        (a, z) = (lo, hi);
    }
    let b = bisect(g, a, z, ROOT_TOL)?;
    let res = f(alpha, r, b)?;
    if res.abs() >= ROOT_TOL {
        return Err(Error::ConvergenceFailure(format!(
            "f(α, r, b1) = {res:e} at α = {alpha}, r = {r}"
        )));
    }
    Ok(b)
}

/// b2 = α − b1.
pub fn solve_b2(alpha: f64, r: f64) -> Result<f64> {
    Ok(alpha - solve_b1(alpha, r)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    B1,
    B2,
    Axis,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::B1 => "b1",
            Branch::B2 => "b2",
            Branch::Axis => "axis",
        }
    }
}

/// A point of D: (α, r) plus the branch of the zero set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub alpha: f64,
    pub r: f64,
    pub branch: Branch,
}

impl DiskPoint {
    pub fn new(alpha: f64, r: f64, branch: Branch) -> Result<Self> {
        let axis = check_interior(alpha, r)?;
        match (axis, branch) {
            (Some(_), _) => Ok(Self {
                alpha,
                r,
                branch: Branch::Axis,
            }),
            (None, Branch::Axis) => Err(domain(format!(
                "r = {r} is not on the axis r = R(α) = {}",
                r_bound(alpha)?
            ))),
            (None, branch) => Ok(Self { alpha, r, branch }),
        }
    }

    /// Unfolded chart (α, u): u = r on b1, u = 2R(α) − r on b2.
    pub fn from_chart(alpha: f64, u: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let big_r = r_bound(alpha)?;
        if !(u > 0.0 && u < 2.0 * big_r) {
            return Err(domain(format!("chart point ({alpha}, {u}) outside D")));
        }
        if (u - big_r).abs() <= 4.0 * f64::EPSILON * big_r {
            Self::new(alpha, big_r, Branch::Axis)
        } else if u < big_r {
            Self::new(alpha, u, Branch::B1)
        } else {
            Self::new(alpha, 2.0 * big_r - u, Branch::B2)
        }
    }

    pub fn chart(&self) -> Result<[f64; 2]> {
        let big_r = r_bound(self.alpha)?;
        Ok(match self.branch {
            Branch::B1 | Branch::Axis => [self.alpha, self.r],
            Branch::B2 => [self.alpha, 2.0 * big_r - self.r],
        })
    }

    pub fn b(&self) -> Result<f64> {
        match self.branch {
            Branch::Axis => Ok(0.5 * self.alpha),
            Branch::B1 => solve_b1(self.alpha, self.r),
            Branch::B2 => solve_b2(self.alpha, self.r),
        }
    }
}

/// The Lawson quadrilateral with 0 < s, t ≤ π belonging to a point of D.
pub fn quad_for(point: &DiskPoint) -> Result<LawsonQuad> {
    let DiskPoint { alpha, r, .. } = *point;
    let big_r = r_bound(alpha)?;
    if point.branch == Branch::Axis {
        let a_sigma = alpha_sigma();
        return if (alpha - a_sigma).abs() <= 1e-12 {
            right_angled(RightAngledKind::Cylindrical, FRAC_PI_2)
        } else if alpha < a_sigma {
            right_angled(RightAngledKind::Equal, big_r)
        } else {
            right_angled(RightAngledKind::Complementary, FRAC_PI_2 - big_r)
        };
    }
    let b = point.b()?;
    let beta = FRAC_PI_2 - alpha + 2.0 * b;
    // Within an ulp of the axis b rounds to α/2; keep β on the branch's side.
    let q = match point.branch {
        Branch::B1 => from_r(beta.min(FRAC_PI_2 - f64::EPSILON), r)?,
        _ => from_r_obtuse(beta.max(FRAC_PI_2 + f64::EPSILON), r)?,
    };
    LawsonQuad::new(balance_l(alpha, r)?, q.t, q.r, q.s, q.beta)
}

/// Quadrilaterals on either side of the axis point (α, R(α)), at
/// β = π/2 ∓ `eta`. Near the axis β − π/2 grows like √(R(α) − r), so β is
/// the well-conditioned parameter for these limits.
pub fn axis_limits(alpha: f64, eta: f64) -> Result<(LawsonQuad, LawsonQuad)> {
    let big_r = r_bound(alpha)?;
    if !(eta > 0.0 && eta < FRAC_PI_4) {
        return Err(domain(format!("eta = {eta} outside (0, π/4)")));
    }
    Ok((
        from_r(FRAC_PI_2 - eta, big_r)?,
        from_r_obtuse(FRAC_PI_2 + eta, big_r)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffordRect {
    pub b: f64,
    pub r: f64,
}

impl CliffordRect {
    /// `b` may be negative; `r` must be positive.
    pub fn new(b: f64, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && b.is_finite()) {
            return Err(domain(format!("Clifford rectangle ({b}, {r}) is invalid")));
        }
        Ok(Self { b, r })
    }

    /// Arcs (cos 2b B − sin 2b C, r), (−A, b), (−B, r), (A, b); a negative b
    /// reverses the A fields.
    pub fn polygon(&self) -> Result<PolygonSpec> {
        let x = HopfDirection::rotated(HopfDirection::B, -HopfDirection::C, 2.0 * self.b);
        let (fa, len) = if self.b >= 0.0 {
            (HopfDirection::A, self.b)
        } else {
            (-HopfDirection::A, -self.b)
        };
        PolygonSpec::from_pairs(&[
            (x, self.r),
            (-fa, len),
            (-HopfDirection::B, self.r),
            (fa, len),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoPentagon {
    pub alpha: f64,
    pub b: f64,
    pub r: f64,
    pub s_minus_b: f64,
    pub l: f64,
    pub t: f64,
}

impl IsoPentagon {
    pub fn new(alpha: f64, b: f64, r: f64, s_minus_b: f64, l: f64, t: f64) -> Result<Self> {
        check_alpha(alpha)?;
        for (name, x) in [("b", b), ("r", r), ("s - b", s_minus_b), ("l", l), ("t", t)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(domain(format!("{name} = {x} must be positive")));
            }
        }
        if l > FRAC_PI_4 + 1e-12 || r > FRAC_PI_2 + 1e-12 {
            return Err(domain(format!("l = {l} or r = {r} out of range")));
        }
        Ok(Self {
            alpha,
            b,
            r,
            s_minus_b,
            l,
            t,
        })
    }

    pub fn lengths(&self) -> [f64; 5] {
        [self.b, self.r, self.s_minus_b, self.l, self.t]
    }

    /// Arcs with Hopf fields −B, cos α A − sin α C, −B, −A, C.
    pub fn polygon(&self) -> Result<PolygonSpec> {
        let arm = HopfDirection::rotated(HopfDirection::A, -HopfDirection::C, self.alpha);
        PolygonSpec::from_pairs(&[
            (-HopfDirection::B, self.b),
            (arm, self.r),
            (-HopfDirection::B, self.s_minus_b),
            (-HopfDirection::A, self.l),
            (HopfDirection::C, self.t),
        ])
    }

    pub fn closure_defect(&self) -> Result<f64> {
        calibrated()?.closure_defect(&self.polygon()?)
    }
}

/// Smallest k ≥ 1 for which the (s − b)-arc is longer than the margin.
pub fn default_extension(quad: &LawsonQuad, b: f64) -> u32 {
    let mut k = 1;
    while arc_lengths(quad.s, b, k).1 <= EXTENSION_MARGIN {
        k += 1;
    }
    k
}

/// (b-arc, (s − b)-arc) after extending s by kπ. A negative b borrows π
/// from the (s − b)-arc, which leaves the closure product unchanged.
fn arc_lengths(s: f64, b: f64, k: u32) -> (f64, f64) {
    let s = s + PI * f64::from(k);
    if b < 0.0 {
        (b + PI, s - b - PI)
    } else {
        (b, s - b)
    }
}

/// Glues a quadrilateral and a Clifford rectangle along their r-arcs,
/// extending s and t by `extension_periods`·π.
pub fn compose_iso(
    quad: &LawsonQuad,
    rect: &CliffordRect,
    extension_periods: u32,
) -> Result<IsoPentagon> {
    if (quad.r - rect.r).abs() > 1e-10 {
        return Err(Error::IncompatiblePair(format!(
            "r values differ: {} vs {}",
            quad.r, rect.r
        )));
    }
    let alpha = FRAC_PI_2 - quad.beta + 2.0 * rect.b;
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::IncompatiblePair(format!(
            "β = {} and b = {} give α = {alpha} outside (0, π/2)",
            quad.beta, rect.b
        )));
    }
    let (b_arc, rest) = arc_lengths(quad.s, rect.b, extension_periods);
    if rest <= 0.0 || b_arc <= 0.0 {
        return Err(Error::NeedMoreExtension {
            s: quad.s + PI * f64::from(extension_periods),
            b: rect.b,
        });
    }
    let t = quad.t + PI * f64::from(extension_periods);
    let p = IsoPentagon::new(alpha, b_arc, quad.r, rest, quad.l, t)?;
    let defect = p.closure_defect()?;
    if defect > CLOSURE_TOL {
        return Err(Error::IncompatiblePair(format!(
            "glued pentagon does not close (defect {defect:e})"
        )));
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeckradiusBounds {
    pub rho_a_max: f64,
    pub rho_s_max: f64,
    /// Bound on 2ρ^A + ρ^S.
    pub sum_max: f64,
}

pub fn neckradius_bounds(alpha: f64) -> Result<NeckradiusBounds> {
    check_alpha(alpha)?;
    let c = alpha.cos();
    let q = c / (2.0 - c);
    let rho_a_max = (1.0 - c) / (2.0 - c);
    Ok(NeckradiusBounds {
        rho_a_max,
        rho_s_max: q.min(1.0 - q),
        sum_max: (4.0 * rho_a_max).min(1.0),
    })
}

/// A fully resolved contour of the isosceles family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoModuliPoint {
    pub alpha: f64,
    pub r: f64,
    pub branch: Branch,
    pub b: f64,
    pub beta: f64,
    pub l: f64,
    pub t: f64,
    pub s: f64,
    #[serde(rename = "rhoA")]
    pub rho_a: f64,
    #[serde(rename = "rhoS")]
    pub rho_s: f64,
    pub f_residual: f64,
    pub closure_defect: f64,
    pub extension_periods: u32,
    pub pentagon: IsoPentagon,
}

pub fn moduli_point(point: &DiskPoint) -> Result<IsoModuliPoint> {
    let quad = quad_for(point)?;
    let b = point.b()?;
    let rect = CliffordRect::new(b, point.r)?;
    let k = default_extension(&quad, b);
    let pentagon = compose_iso(&quad, &rect, k)?;
    Ok(IsoModuliPoint {
        alpha: point.alpha,
        r: point.r,
        branch: point.branch,
        b,
        beta: quad.beta,
        l: quad.l,
        t: quad.t,
        s: quad.s,
        rho_a: balancing::neckradius_from_half(point.r)?,
        rho_s: balancing::neckradius_from_quarter(quad.l)?,
        f_residual: f(point.alpha, point.r, b)?.abs(),
        closure_defect: pentagon.closure_defect()?,
        extension_periods: k,
        pentagon,
    })
}

/// Uniform open grids α_i = (π/2) i/(n+1) and r_j = (π/2) j/(m+1).
pub fn uniform_grid(n_alpha: usize, n_r: usize) -> (Vec<f64>, Vec<f64>) {
    let g = |n: usize| {
        (1..=n)
            .map(|i| FRAC_PI_2 * i as f64 / (n + 1) as f64)
            .collect()
    };
    (g(n_alpha), g(n_r))
}

/// For each α: both branches at every grid r < R(α), then the axis point r = R(α).
pub fn sample_disk(alphas: &[f64], rs: &[f64]) -> Result<Vec<IsoModuliPoint>> {
    if alphas.is_empty() || rs.is_empty() {
        return Err(domain("empty sampling grid"));
    }
    let rows: Vec<Result<Vec<IsoModuliPoint>>> = alphas
        .par_iter()
        .map(|&alpha| {
            let big_r = r_bound(alpha)?;
            let mut row = Vec::new();
            for &r in rs {
                if r > 0.0 && r < big_r && check_interior(alpha, r)?.is_none() {
                    row.push(moduli_point(&DiskPoint::new(alpha, r, Branch::B1)?)?);
                    row.push(moduli_point(&DiskPoint::new(alpha, r, Branch::B2)?)?);
                }
            }
            row.push(moduli_point(&DiskPoint::new(alpha, big_r, Branch::Axis)?)?);
            Ok(row)
        })
        .collect();
    let mut out = Vec::new();
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// A passage of a loop across the axis of D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Index of the first loop point past the crossing.
    pub index: usize,
    pub alpha: f64,
    /// +1 for b2 → b1 below σ, −1 for b1 → b2 below σ, 0 above σ.
    pub sign: i64,
}

/// Axis crossings of a closed loop given in chart coordinates (α, u).
pub fn monodromy_crossings(chart_loop: &[[f64; 2]]) -> Result<Vec<Crossing>> {
    let invalid = |why: String| Error::InvalidLoop(why);
    if chart_loop.len() < 4 {
        return Err(invalid(format!(
            "loop has only {} points",
            chart_loop.len()
        )));
    }
    let first = chart_loop[0];
    let last = chart_loop[chart_loop.len() - 1];
    if (first[0] - last[0]).abs() > 1e-12 || (first[1] - last[1]).abs() > 1e-12 {
        return Err(invalid("first and last points differ".into()));
    }
    for (i, w) in chart_loop.windows(2).enumerate() {
        let step = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        if step.is_nan() || step > MONODROMY_STEP {
            return Err(Error::AmbiguousPath {
                index: i + 1,
                step,
                threshold: MONODROMY_STEP,
            });
        }
    }
    let a_sigma = alpha_sigma();
    let pts = &chart_loop[..chart_loop.len() - 1];
    let mut side = Vec::with_capacity(pts.len());
    let mut height = Vec::with_capacity(pts.len());
    for (i, &[alpha, u]) in pts.iter().enumerate() {
        let p = DiskPoint::from_chart(alpha, u)
            .map_err(|e| invalid(format!("point {i} ({alpha}, {u}): {e}")))?;
        if (alpha - a_sigma).hypot(u - FRAC_PI_4) < 1e-9 {
            return Err(invalid(format!("point {i} is σ")));
        }
        side.push(match p.branch {
            Branch::B1 => -1,
            Branch::B2 => 1,
            Branch::Axis => 0,
        });
        height.push(u - r_bound(alpha)?);
    }
    let Some(k0) = side.iter().position(|&s| s != 0) else {
        return Err(invalid("loop runs along the axis".into()));
    };
    let m = pts.len();
    let mut crossings = Vec::new();
    let mut prev = k0;
    let mut pending_axis: Option<f64> = None;
    for step in 1..=m {
        let j = (k0 + step) % m;
        if side[j] == 0 {
            pending_axis.get_or_insert(pts[j][0]);
            continue;
        }
        if side[j] != side[prev] {
            let alpha = pending_axis.unwrap_or_else(|| {
                let (g0, g1) = (height[prev], height[j]);
                let w = g0 / (g0 - g1);
                pts[prev][0] + w * (pts[j][0] - pts[prev][0])
            });
            let sign = if alpha < a_sigma { -side[j] } else { 0 };
            crossings.push(Crossing {
                index: j,
                alpha,
                sign,
            });
        }
        pending_axis = None;
        prev = j;
    }
    Ok(crossings)
}

/// Net signed number of crossings of the axis below σ; equals the winding
/// number of the loop around σ.
pub fn monodromy(chart_loop: &[[f64; 2]]) -> Result<i64> {
    Ok(monodromy_crossings(chart_loop)?
        .iter()
        .map(|c| c.sign)
        .sum())
}

/// Closed polygonal circle in the chart, traversed `turns` times counterclockwise.
pub fn chart_circle(center: [f64; 2], radius: f64, points: usize, turns: usize) -> Vec<[f64; 2]> {
    let total = points * turns;
    let mut out: Vec<[f64; 2]> = (0..total)
        .map(|k| {
            let th = 2.0 * PI * (k % points) as f64 / points as f64;
            [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
        })
        .collect();
    out.push(out[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> [f64; 2] {
        [alpha_sigma(), FRAC_PI_4]
    }

    #[test]
    fn r_max_cases() {
        assert_eq!(r_max(FRAC_PI_3).unwrap(), FRAC_PI_2);
        assert_eq!(r_max(PI / 2.5).unwrap(), FRAC_PI_2);
        assert!((r_max(1e-9).unwrap() - 0.460_075_592_255_305_1).abs() < 1e-12);
        assert!((r_max(FRAC_PI_3 - 1e-9).unwrap() - FRAC_PI_2).abs() < 1e-3);
        assert_eq!(r_max(0.0).unwrap_err().name(), "DomainError");
        assert_eq!(r_max(FRAC_PI_2).unwrap_err().name(), "DomainError");
    }

    #[test]
    fn r_bound_values() {
        assert!((r_bound(FRAC_PI_3).unwrap() - FRAC_PI_3).abs() < 1e-15);
        assert!((r_bound(alpha_sigma()).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(r_bound(1e-8).unwrap() < 1e-15);
        for a in [0.1, 0.5, 1.0, 1.5] {
            assert!(r_bound(a).unwrap() <= r_max(a).unwrap());
        }
    }

    #[test]
    fn f_at_sigma_vanishes() {
        let a = alpha_sigma();
        assert!(f(a, FRAC_PI_4, a / 2.0).unwrap().abs() < 1e-12);
        assert_eq!(f(0.2, 1.0, 0.0).unwrap_err().name(), "DomainError");
    }

    #[test]
    fn f_bracket_signs() {
        for a in [0.2, 0.8, 1.3] {
            let big_r = r_bound(a).unwrap();
            for k in 1..10 {
                let r = big_r * k as f64 / 10.0;
                assert!(f(a, r, a / 2.0 - FRAC_PI_4).unwrap() > 0.0);
                assert!(f(a, r, a / 2.0).unwrap() < 0.0);
            }
        }
    }

    #[test]
    fn b1_reference_values() {
        let b1 = solve_b1(FRAC_PI_3, PI / 6.0).unwrap();
        assert!((b1 - 0.045_940_466_536_044_234).abs() < 1e-12);
        let b2 = solve_b2(FRAC_PI_3, PI / 6.0).unwrap();
        assert!((b2 - 1.001_257_084_660_553_5).abs() < 1e-12);
        assert_eq!(solve_b1(0.7, r_bound(0.7).unwrap()).unwrap(), 0.35);
        assert_eq!(solve_b2(0.7, r_bound(0.7).unwrap()).unwrap(), 0.35);
        assert_eq!(
            solve_b1(FRAC_PI_3, FRAC_PI_2).unwrap_err().name(),
            "NoInteriorRoot"
        );
    }

    #[test]
    fn b1_matches_closed_form() {
        // α − 2b1 = arcsin(√(cos²2l − cos²2r) / sin 2r), with the difference
        // of squares factored.
        for &(a, frac) in &[
            (0.1, 0.5),
            (0.6, 0.01),
            (0.9, 0.99),
            (1.4, 0.3),
            (0.05, 1e-4),
        ] {
            let r = r_bound(a).unwrap() * frac;
            let l = balance_l(a, r).unwrap();
            let x =
                ((2.0 * r + 2.0 * l).sin() * (2.0 * r - 2.0 * l).sin()).sqrt() / (2.0 * r).sin();
            let expect = 0.5 * (a - x.asin());
            assert!(
                (solve_b1(a, r).unwrap() - expect).abs() < 1e-9,
                "{a} {frac}"
            );
        }
    }

    #[test]
    fn balance_l_values() {
        let a = alpha_sigma();
        assert!((balance_l(a, FRAC_PI_4).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!(balance_l(0.5, 1e-9).unwrap() < 1e-8);
        for &(a, r) in &[(0.3, 0.2), (1.0, 0.7), (1.5, 1.5)] {
            let l = balance_l(a, r).unwrap();
            assert!((l * (PI - 2.0 * l) - a.cos() * r * (PI - r)).abs() < 1e-12);
        }
        assert_eq!(balance_l(0.2, 1.0).unwrap_err().name(), "DomainError");
    }

    #[test]
    fn quad_for_reference() {
        let p = DiskPoint::new(FRAC_PI_3, PI / 6.0, Branch::B1).unwrap();
        let q = quad_for(&p).unwrap();
        assert!((q.beta - 0.615_479_708_670_387_3).abs() < 1e-12);
        assert!((q.l - PI / 12.0).abs() < 1e-12);
        assert!((q.t - 0.477_658_309_062_254_64).abs() < 1e-12);
        assert!((q.s - 0.137_821_399_608_132_7).abs() < 1e-12);
        assert!(q.max_residual() < 1e-10);
        let b = p.b().unwrap();
        let lhs = (2.0 * q.l).cos().powi(2);
        let rhs = (FRAC_PI_3 - 2.0 * b).sin().powi(2) * (2.0 * q.r).sin().powi(2)
            + (2.0 * q.r).cos().powi(2);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn quad_for_axis() {
        let a = 0.5;
        let big_r = r_bound(a).unwrap();
        let q = quad_for(&DiskPoint::new(a, big_r, Branch::Axis).unwrap()).unwrap();
        assert_eq!((q.l, q.t, q.r, q.s), (big_r, PI, big_r, PI));
        let a = 1.2;
        let big_r = r_bound(a).unwrap();
        let q = quad_for(&DiskPoint::new(a, big_r, Branch::Axis).unwrap()).unwrap();
        assert_eq!((q.t, q.r, q.s), (FRAC_PI_2, big_r, FRAC_PI_2));
        assert!((q.l - (FRAC_PI_2 - big_r)).abs() < 1e-15);
        assert!(DiskPoint::new(a, 0.1, Branch::Axis).is_err());
    }

    #[test]
    fn clifford_rectangles_close() {
        let oracle = calibrated().unwrap();
        for &(b, r) in &[(0.3, 0.5), (-0.2, 1.1), (0.0, 0.4), (1.0, 0.05)] {
            let p = CliffordRect::new(b, r).unwrap().polygon().unwrap();
            assert!(oracle.closure_defect(&p).unwrap() < 1e-9, "{b} {r}");
        }
    }

    #[test]
    fn sigma_pentagon() {
        let a = alpha_sigma();
        let p = DiskPoint::new(a, FRAC_PI_4, Branch::Axis).unwrap();
        let q = quad_for(&p).unwrap();
        let rect = CliffordRect::new(a / 2.0, FRAC_PI_4).unwrap();
        let pent = compose_iso(&q, &rect, 1).unwrap();
        assert!(pent.closure_defect().unwrap() < 1e-9);
    }

    #[test]
    fn extension_errors() {
        let r = 0.5 * r_bound(0.3).unwrap();
        let p = DiskPoint::new(0.3, r, Branch::B1).unwrap();
        let q = quad_for(&p).unwrap();
        let b = p.b().unwrap();
        assert!(q.s <= b);
        let rect = CliffordRect::new(b, r).unwrap();
        assert_eq!(
            compose_iso(&q, &rect, 0).unwrap_err().name(),
            "NeedMoreExtension"
        );
        assert!(compose_iso(&q, &rect, 1).is_ok());
        let other = CliffordRect::new(b, 1.1 * r).unwrap();
        assert_eq!(
            compose_iso(&q, &other, 1).unwrap_err().name(),
            "IncompatiblePair"
        );
    }

    #[test]
    fn negative_b_borrows_half_period() {
        let r = 0.1 * r_bound(1.2).unwrap();
        let p = DiskPoint::new(1.2, r, Branch::B1).unwrap();
        let m = moduli_point(&p).unwrap();
        assert!(m.b < 0.0);
        assert!((m.pentagon.b - (m.b + PI)).abs() < 1e-15);
        assert!(m.pentagon.s_minus_b > EXTENSION_MARGIN);
        assert!(m.closure_defect < 1e-9);
    }

    #[test]
    fn bounds_values() {
        let b = neckradius_bounds(alpha_sigma()).unwrap();
        assert!((b.rho_a_max - 0.25).abs() < 1e-15 && (b.rho_s_max - 0.5).abs() < 1e-15);
        assert!((neckradius_bounds(FRAC_PI_3).unwrap().rho_a_max - 1.0 / 3.0).abs() < 1e-15);
        let b = neckradius_bounds(1e-6).unwrap();
        assert!(b.rho_a_max < 1e-11 && b.rho_s_max < 1e-11);
    }

    #[test]
    fn sigma_in_sample() {
        let pts = sample_disk(&[alpha_sigma()], &[0.2, 0.5, FRAC_PI_4, 1.0]).unwrap();
        assert_eq!(pts.len(), 2 * 2 + 1);
        let axis = pts.last().unwrap();
        assert_eq!(axis.branch, Branch::Axis);
        assert!((axis.rho_a - 0.25).abs() < 1e-12 && (axis.rho_s - 0.5).abs() < 1e-12);
        assert!(pts
            .iter()
            .all(|p| p.r <= FRAC_PI_4 + 1e-15 && p.closure_defect < 1e-9));
    }

    #[test]
    fn chart_round_trip() {
        let p = DiskPoint::from_chart(1.0, 1.5 * r_bound(1.0).unwrap()).unwrap();
        assert_eq!(p.branch, Branch::B2);
        let [a, u] = p.chart().unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (u - 1.5 * r_bound(1.0).unwrap()).abs() < 1e-15);
        assert!(DiskPoint::from_chart(1.0, 3.0).is_err());
    }

    #[test]
    fn monodromy_examples() {
        let c = sigma();
        assert_eq!(monodromy(&chart_circle(c, 0.05, 64, 1)).unwrap(), 1);
        assert_eq!(
            monodromy(&chart_circle([c[0] + 0.3, c[1]], 0.05, 64, 1)).unwrap(),
            0
        );
        assert_eq!(monodromy(&chart_circle(c, 0.05, 64, 2)).unwrap(), 2);
        let mut rev = chart_circle(c, 0.05, 64, 1);
        rev.reverse();
        assert_eq!(monodromy(&rev).unwrap(), -1);
    }

    #[test]
    fn monodromy_errors() {
        let mut open = chart_circle(sigma(), 0.05, 64, 1);
        open.pop();
        assert_eq!(monodromy(&open).unwrap_err().name(), "InvalidLoop");
        let coarse = chart_circle(sigma(), 0.05, 4, 1);
        assert_eq!(monodromy(&coarse).unwrap_err().name(), "AmbiguousPath");
    }
}
