//! Truncated rectangular pentagons Γ(t1, l1, s, l2, t2).
//!
//! Each pentagon is glued from two Lawson quadrilaterals sharing their
//! r-arc, with angles β and π/2 − β. For fixed neck lengths (l1, l2) with
//! l1 + l2 < π/4 there are two such pentagons, one on each sheet r < π/4
//! and r > π/4.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balancing;
use crate::bisect::bisect;
use crate::error::{domain, Error, Result};
use crate::lawson::{from_r, LawsonQuad};
use crate::s3_oracle::{calibrated, HopfDirection, PolygonSpec};

/// Tolerance for matching the shared arc and the complementary angles.
pub const COMPOSE_TOL: f64 = 1e-10;
/// Round-trip tolerance of [`decompose`].
pub const DECOMPOSE_TOL: f64 = 1e-9;
/// Target accuracy of [`solve_r`] in l2.
pub const SOLVE_TOL: f64 = 1e-10;

/// Slack on l1 + l2 = π/4 treated as the equality case.
const DIAGONAL_EPS: f64 = 1e-14;
const MIDPOINT_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectPentagon {
    pub t1: f64,
    pub l1: f64,
    pub s: f64,
    pub l2: f64,
    pub t2: f64,
}

impl RectPentagon {
    pub fn new(t1: f64, l1: f64, s: f64, l2: f64, t2: f64) -> Result<Self> {
        for (name, x) in [("t1", t1), ("l1", l1), ("s", s), ("l2", l2), ("t2", t2)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(domain(format!("{name} = {x} must be positive")));
            }
        }
        for (name, x) in [("l1", l1), ("l2", l2)] {
            if x > FRAC_PI_4 + 1e-12 {
                return Err(domain(format!("{name} = {x} exceeds π/4")));
            }
        }
        Ok(Self { t1, l1, s, l2, t2 })
    }

    pub fn lengths(&self) -> [f64; 5] {
        [self.t1, self.l1, self.s, self.l2, self.t2]
    }

    /// Arcs with Hopf fields A, −C, −B, −A, C.
    pub fn polygon(&self) -> Result<PolygonSpec> {
        PolygonSpec::from_pairs(&[
            (HopfDirection::A, self.t1),
            (-HopfDirection::C, self.l1),
            (-HopfDirection::B, self.s),
            (-HopfDirection::A, self.l2),
            (HopfDirection::C, self.t2),
        ])
    }

    pub fn closure_defect(&self) -> Result<f64> {
        calibrated()?.closure_defect(&self.polygon()?)
    }

    /// Neckradii (ρ1, ρ2) of the two quarter ends.
    pub fn neckradii(&self) -> Result<(f64, f64)> {
        Ok((
            balancing::neckradius_from_quarter(self.l1)?,
            balancing::neckradius_from_quarter(self.l2)?,
        ))
    }

    fn max_difference(&self, other: &Self) -> f64 {
        self.lengths()
            .iter()
            .zip(other.lengths())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectDecomposition {
    pub quad1: LawsonQuad,
    pub quad2: LawsonQuad,
    pub r: f64,
    pub beta: f64,
    pub s1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    /// r ≤ π/4.
    Lower,
    /// r ≥ π/4.
    Upper,
}

impl Sheet {
    pub fn of(r: f64) -> Sheet {
        if r <= FRAC_PI_4 {
            Sheet::Lower
        } else {
            Sheet::Upper
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Sheet::Lower => "lower",
            Sheet::Upper => "upper",
        }
    }
}

fn check_pair(l1: f64, r: f64) -> Result<()> {
    if !(l1 > 0.0 && l1 < FRAC_PI_4) {
        return Err(domain(format!("l1 = {l1} outside (0, π/4)")));
    }
    if !(r > l1 && r < FRAC_PI_2 - l1) {
        return Err(domain(format!(
            "r = {r} outside ({l1}, {})",
            FRAC_PI_2 - l1
        )));
    }
    Ok(())
}

/// sin(2r + 2l1) sin(2r − 2l1) = cos²2l1 − cos²2r, clamped at zero.
fn gap(l1: f64, r: f64) -> f64 {
    ((2.0 * r + 2.0 * l1).sin() * (2.0 * r - 2.0 * l1).sin()).max(0.0)
}

/// Angle β of the first quadrilateral, given its neck length l1 and shared arc r.
pub fn beta_from(l1: f64, r: f64) -> Result<f64> {
    check_pair(l1, r)?;
    if (r - FRAC_PI_4).abs() <= MIDPOINT_EPS {
        return Ok(2.0 * l1);
    }
    Ok((2.0 * l1).sin().atan2(gap(l1, r).sqrt()))
}

fn l2_unchecked(l1: f64, r: f64) -> f64 {
    if (r - FRAC_PI_4).abs() <= MIDPOINT_EPS {
        return FRAC_PI_4 - l1;
    }
    let s2 = (2.0 * l1).sin();
    let c2r = (2.0 * r).cos();
    0.5 * gap(l1, r).sqrt().atan2((s2 * s2 + c2r * c2r).sqrt())
}

/// Neck length l2 of the second quadrilateral (angle π/2 − β, same r).
pub fn l2_from(l1: f64, r: f64) -> Result<f64> {
    check_pair(l1, r)?;
    Ok(l2_unchecked(l1, r))
}

/// The shared arc r on the requested sheet for prescribed neck lengths.
pub fn solve_r(l1: f64, l2: f64, sheet: Sheet) -> Result<f64> {
    if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
        return Err(domain(format!(
            "neck lengths must be positive (l1 = {l1}, l2 = {l2})"
        )));
    }
    let excess = l1 + l2 - FRAC_PI_4;
    if excess > DIAGONAL_EPS {
        return Err(Error::NoSolution(format!(
            "l1 + l2 = {} exceeds π/4",
            l1 + l2
        )));
    }
    if excess >= -DIAGONAL_EPS {
        return Ok(FRAC_PI_4);
    }
    // l2(r) rises from 0 at r = l1 to π/4 − l1 at r = π/4 and falls back
    // to 0 at r = π/2 − l1.
    let g = |r: f64| l2_unchecked(l1, r) - l2;
    let r = match sheet {
        Sheet::Lower => bisect(g, l1, FRAC_PI_4, SOLVE_TOL / 100.0)?,
        Sheet::Upper => bisect(g, FRAC_PI_4, FRAC_PI_2 - l1, SOLVE_TOL / 100.0)?,
    };
    if r <= l1 || r >= FRAC_PI_2 - l1 {
        return Err(Error::ConvergenceFailure(format!(
            "root r = {r} collapsed onto the boundary"
        )));
    }
    Ok(r)
}

/// Glues two quadrilaterals along their r-arcs.
pub fn compose(quad1: &LawsonQuad, quad2: &LawsonQuad) -> Result<RectPentagon> {
    let incompatible = |why: String| Error::IncompatibleQuadrilaterals(why);
    if (quad1.r - quad2.r).abs() > COMPOSE_TOL {
        return Err(incompatible(format!(
            "r values differ: {} vs {}",
            quad1.r, quad2.r
        )));
    }
    if (quad1.beta + quad2.beta - FRAC_PI_2).abs() > COMPOSE_TOL {
        return Err(incompatible(format!(
            "angles {} and {} do not sum to π/2",
            quad1.beta, quad2.beta
        )));
    }
    let p = RectPentagon::new(quad1.t, quad1.l, quad1.s + quad2.s, quad2.l, quad2.t)
        .map_err(|e| incompatible(e.to_string()))?;
    let defect = p.closure_defect()?;
    if defect > crate::s3_oracle::CLOSURE_TOL {
        return Err(incompatible(format!(
            "glued pentagon does not close (defect {defect:e})"
        )));
    }
    Ok(p)
}

fn build(l1: f64, r: f64) -> Result<RectDecomposition> {
    let beta = beta_from(l1, r)?;
    let quad1 = from_r(beta, r)?;
    let quad2 = from_r(FRAC_PI_2 - beta, r)?;
    Ok(RectDecomposition {
        quad1,
        quad2,
        r,
        beta,
        s1: quad1.s,
    })
}

impl RectDecomposition {
    pub fn pentagon(&self) -> Result<RectPentagon> {
        compose(&self.quad1, &self.quad2)
    }
}

/// Recovers the two quadrilaterals of a pentagon.
pub fn decompose(p: &RectPentagon) -> Result<RectDecomposition> {
    let not_rect = |why: String| Error::NotARectangularContour(format!("{p:?}: {why}"));
    if p.l1 + p.l2 > FRAC_PI_4 + DIAGONAL_EPS {
        return Err(not_rect("l1 + l2 exceeds π/4".into()));
    }
    if p.l1 >= FRAC_PI_4 {
        return Err(not_rect("l1 must be below π/4".into()));
    }
    // cos 2r = cos 2l1 cos 2t1 pins r directly and stays well conditioned
    // near r = π/4, where l2(r) is flat.
    let from_t1 = 0.5
        * ((2.0 * p.l1).cos() * (2.0 * p.t1).cos())
            .clamp(-1.0, 1.0)
            .acos();
    for sheet in [Sheet::Lower, Sheet::Upper] {
        let r = if Sheet::of(from_t1) == sheet && from_t1 > p.l1 && from_t1 < FRAC_PI_2 - p.l1 {
            from_t1
        } else {
            match solve_r(p.l1, p.l2, sheet) {
                Ok(r) => r,
                Err(_) => continue,
            }
        };
        let Ok(d) = build(p.l1, r) else { continue };
        let Ok(q) = RectPentagon::new(
            d.quad1.t,
            d.quad1.l,
            d.quad1.s + d.quad2.s,
            d.quad2.l,
            d.quad2.t,
        ) else {
            continue;
        };
        if q.max_difference(p) < DECOMPOSE_TOL {
            return Ok(d);
        }
    }
    Err(not_rect("no sheet reproduces the pentagon".into()))
}

/// One sampled contour of the rectangular family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectModuliPoint {
    pub rho1: f64,
    pub rho2: f64,
    pub sheet: Sheet,
    pub r: f64,
    pub beta: f64,
    pub pentagon: RectPentagon,
    pub closure_defect: f64,
}

impl RectModuliPoint {
    pub fn l1(&self) -> f64 {
        self.pentagon.l1
    }

    pub fn l2(&self) -> f64 {
        self.pentagon.l2
    }
}

/// Contour for the neck lengths (l1, l2) on one sheet.
pub fn moduli_point(l1: f64, l2: f64, sheet: Sheet) -> Result<RectModuliPoint> {
    let r = solve_r(l1, l2, sheet)?;
    let d = build(l1, r)?;
    let pentagon = d.pentagon()?;
    let (rho1, rho2) = pentagon.neckradii()?;
    Ok(RectModuliPoint {
        rho1,
        rho2,
        sheet,
        r,
        beta: d.beta,
        pentagon,
        closure_defect: pentagon.closure_defect()?,
    })
}

/// Output of [`sample_moduli`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectSample {
    pub resolution: usize,
    pub points: Vec<RectModuliPoint>,
    /// Grid nodes on ρ1 = 0 or ρ2 = 0, left out of `points`.
    pub excluded_boundary_nodes: usize,
    pub boundary_note: String,
}

pub const BOUNDARY_NOTE: &str =
    "rho1 -> 0 or rho2 -> 0: Delaunay surfaces joined by an orthogonal string of spheres (not sampled)";

/// Uniform grid ρ = k/(2n) over the triangle ρ1 + ρ2 ≤ 1/2, ρ1, ρ2 > 0.
/// Interior nodes give two contours, diagonal nodes one.
pub fn sample_moduli(resolution: usize) -> Result<RectSample> {
    if resolution < 2 {
        return Err(domain(format!(
            "resolution {resolution} must be at least 2"
        )));
    }
    let n = resolution;
    let h = 1.0 / (2.0 * n as f64);
    let rows: Vec<Result<Vec<RectModuliPoint>>> = (1..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in 1..=(n - i) {
                let l1 = PI * (i as f64 * h) / 2.0;
                let l2 = PI * (j as f64 * h) / 2.0;
                if i + j == n {
                    row.push(moduli_point(l1, l2, Sheet::Lower)?);
                } else {
                    row.push(moduli_point(l1, l2, Sheet::Lower)?);
                    row.push(moduli_point(l1, l2, Sheet::Upper)?);
                }
            }
            Ok(row)
        })
        .collect();
    let mut points = Vec::new();
    for row in rows {
        points.extend(row?);
    }
    Ok(RectSample {
        resolution: n,
        points,
        excluded_boundary_nodes: 2 * n + 1,
        boundary_note: BOUNDARY_NOTE.to_string(),
    })
}

/// A pentagon whose arcs t1, t2, s are lengthened by whole quarter periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublyPeriodicContour {
    pub base: RectPentagon,
    pub m: u32,
    pub n: u32,
}

impl DoublyPeriodicContour {
    /// (t1 + nπ/2, l1, s + (m + n)π/2, l2, t2 + mπ/2).
    pub fn extended(&self) -> RectPentagon {
        let q = FRAC_PI_2;
        let (m, n) = (f64::from(self.m), f64::from(self.n));
        RectPentagon {
            t1: self.base.t1 + n * q,
            l1: self.base.l1,
            s: self.base.s + (m + n) * q,
            l2: self.base.l2,
            t2: self.base.t2 + m * q,
        }
    }

    /// Undoes the extension on a length record.
    pub fn reduce(extended: &RectPentagon, m: u32, n: u32) -> Result<RectPentagon> {
        let q = FRAC_PI_2;
        let (m, n) = (f64::from(m), f64::from(n));
        RectPentagon::new(
            extended.t1 - n * q,
            extended.l1,
            extended.s - (m + n) * q,
            extended.l2,
            extended.t2 - m * q,
        )
    }
}

pub fn doubly_periodic(p: &RectPentagon, m: i64, n: i64) -> Result<DoublyPeriodicContour> {
    if m < 0 || n < 0 {
        return Err(domain(format!(
            "periods must be non-negative (m = {m}, n = {n})"
        )));
    }
    let to_u32 = |k: i64| u32::try_from(k).map_err(|_| domain(format!("period {k} too large")));
    Ok(DoublyPeriodicContour {
        base: *p,
        m: to_u32(m)?,
        n: to_u32(n)?,
    })
}
