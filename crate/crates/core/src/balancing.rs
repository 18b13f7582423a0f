//! Delaunay ends, their forces, and the balancing condition.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// An end asymptotic to a Delaunay unduloid with neckradius ρ along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelaunayEnd {
    rho: f64,
    axis: [f64; 3],
}

impl DelaunayEnd {
    pub fn new(rho: f64, axis: [f64; 3]) -> Result<Self> {
        if !(rho > 0.0 && rho <= 0.5) {
            return Err(domain(format!("neckradius {rho} outside (0, 1/2]")));
        }
        let n = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(domain(format!("axis {axis:?} is not a unit vector")));
        }
        Ok(Self { rho, axis })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    /// Bulge radius 1 − ρ of the same unduloid.
    pub fn bulge_radius(&self) -> f64 {
        1.0 - self.rho
    }
}

/// |f| = 2πρ(1 − ρ); unchanged under ρ ↦ 1 − ρ.
pub fn force_magnitude(rho: f64) -> f64 {
    2.0 * PI * rho * (1.0 - rho)
}

pub fn force(end: &DelaunayEnd) -> [f64; 3] {
    let m = force_magnitude(end.rho);
    end.axis.map(|a| m * a)
}

/// Euclidean norm of the summed end forces.
pub fn balance_residual(ends: &[DelaunayEnd]) -> Result<f64> {
    if ends.len() < 2 {
        return Err(domain(format!("need at least 2 ends, got {}", ends.len())));
    }
    let mut total = [0.0; 3];
    for e in ends {
        for (t, f) in total.iter_mut().zip(force(e)) {
            *t += f;
        }
    }
    Ok(total.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// ρ = 2l/π for an end cut into quarters by perpendicular arcs of length l.
pub fn neckradius_from_quarter(l: f64) -> Result<f64> {
    if !(l > 0.0 && l <= FRAC_PI_4 + 1e-12) {
        return Err(domain(format!("l = {l} outside (0, π/4]")));
    }
    Ok((2.0 * l / PI).min(0.5))
}

/// ρ = r/π for a half end with perpendicular arc of length r.
pub fn neckradius_from_half(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= FRAC_PI_2 + 1e-12) {
        return Err(domain(format!("r = {r} outside (0, π/2]")));
    }
    Ok((r / PI).min(0.5))
}

/// Four ends along ±x (ρ1) and ±y (ρ2).
pub fn rectangular_cross(rho1: f64, rho2: f64) -> Result<Vec<DelaunayEnd>> {
    Ok(vec![
        DelaunayEnd::new(rho1, [1.0, 0.0, 0.0])?,
        DelaunayEnd::new(rho1, [-1.0, 0.0, 0.0])?,
        DelaunayEnd::new(rho2, [0.0, 1.0, 0.0])?,
        DelaunayEnd::new(rho2, [0.0, -1.0, 0.0])?,
    ])
}

/// A stem (ρ^S along −z) and two arms (ρ^A along ±sin α x + cos α z).
pub fn isosceles_triple(alpha: f64, rho_s: f64, rho_a: f64) -> Result<Vec<DelaunayEnd>> {
    let (s, c) = alpha.sin_cos();
    Ok(vec![
        DelaunayEnd::new(rho_s, [0.0, 0.0, -1.0])?,
        DelaunayEnd::new(rho_a, [s, 0.0, c])?,
        DelaunayEnd::new(rho_a, [-s, 0.0, c])?,
    ])
}
