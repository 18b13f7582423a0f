//! The `verify-all` invariant suites.
//!
//! Every suite reports its worst residual against a tolerance. Reports are
//! plain text without timings, so identical options give identical bytes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::balancing;
use crate::error::{Error, Result};
use crate::isosceles::{self as iso, Branch, CliffordRect, DiskPoint};
use crate::lawson::{self, Edge, RightAngledKind, SubstitutionStep};
use crate::rectangular::{self as rect, Sheet};
use crate::s3_oracle::{calibrated, ArcSpec, HopfDirection, Oracle, PolygonSpec};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Replaces every suite tolerance.
    pub tol: Option<f64>,
    /// Flips the −A field to +A in the calibration references.
    pub inject_field_sign_fault: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{} {:<24} worst={:.3e} tol={:.1e} {}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.worst,
                s.tolerance,
                s.detail
            );
        }
        let failed = self.suites.iter().filter(|s| !s.passed).count();
        let _ = writeln!(
            out,
            "{}: {} suites, {} failed",
            if failed == 0 { "OK" } else { "FAILED" },
            self.suites.len(),
            failed
        );
        out
    }
}

/// Worst residual plus any pass/fail conditions that are not residuals.
struct Check {
    worst: f64,
    samples: usize,
    conditions: Vec<(bool, String)>,
}

impl Check {
    fn new() -> Self {
        Self {
            worst: 0.0,
            samples: 0,
            conditions: Vec::new(),
        }
    }

    fn track(&mut self, x: f64) {
        self.samples += 1;
        // NaN must never pass.
        if x.is_nan() || x.abs() > self.worst {
            self.worst = if x.is_nan() { f64::INFINITY } else { x.abs() };
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        self.conditions.push((ok, what.into()));
    }
}

type Suite = fn(f64) -> Result<Check>;

const SUITES: &[(&str, f64, Suite)] = &[
    ("lawson-residuals", 1e-10, lawson_residuals),
    ("closure", 1e-9, closure),
    ("substitution-invariance", 1e-12, substitution_invariance),
    ("classification", 1e-8, classification),
    ("rect-bound", 1e-12, rect_bound),
    ("rect-solve", 1e-10, rect_solve),
    ("rect-decompose", 1e-9, rect_decompose),
    ("dihedral", 1e-12, dihedral),
    ("iso-zero-set", 1e-12, iso_zero_set),
    ("sigma", 1e-12, sigma),
    ("iso-bounds", 1e-10, iso_bounds),
    ("balancing", 1e-12, balancing_suite),
    ("axis-limits", 1e-9, axis_limits),
    ("gradient", 1e-6, gradient),
    ("monodromy", 0.5, monodromy),
];

pub fn verify_all(opts: &VerifyOptions) -> VerifyReport {
    let mut suites = Vec::new();
    let cal_tol = opts.tol.unwrap_or(crate::s3_oracle::CLOSURE_TOL);
    let calibration = calibration(opts.inject_field_sign_fault);
    let cal_ok = match &calibration {
        Ok((worst, conv)) => {
            let passed = *worst <= cal_tol;
            suites.push(SuiteOutcome {
                name: "calibration",
                passed,
                worst: *worst,
                tolerance: cal_tol,
                detail: format!("conventions {conv}"),
            });
            passed
        }
        Err(e) => {
            suites.push(SuiteOutcome {
                name: "calibration",
                passed: false,
                worst: f64::INFINITY,
                tolerance: cal_tol,
                detail: e.to_string(),
            });
            false
        }
    };
    for &(name, default_tol, suite) in SUITES {
        let tolerance = opts.tol.unwrap_or(default_tol);
        if !cal_ok {
            suites.push(SuiteOutcome {
                name,
                passed: false,
                worst: f64::INFINITY,
                tolerance,
                detail: "not run: calibration failed".into(),
            });
            continue;
        }
        let outcome = match suite(tolerance) {
            Ok(c) => {
                let failed: Vec<&str> = c
                    .conditions
                    .iter()
                    .filter(|(ok, _)| !ok)
                    .map(|(_, w)| w.as_str())
                    .collect();
                let passed = c.worst <= tolerance && failed.is_empty();
                let detail = if failed.is_empty() {
                    format!("{} values, {} conditions", c.samples, c.conditions.len())
                } else {
                    format!("failed: {}", failed.join("; "))
                };
                SuiteOutcome {
                    name,
                    passed,
                    worst: c.worst,
                    tolerance,
                    detail,
                }
            }
            Err(e) => SuiteOutcome {
                name,
                passed: false,
                worst: f64::INFINITY,
                tolerance,
                detail: e.to_string(),
            },
        };
        suites.push(outcome);
    }
    VerifyReport { suites }
}

fn flip_minus_a(p: &PolygonSpec) -> Result<PolygonSpec> {
    let minus_a = -HopfDirection::A;
    let arcs = p
        .arcs()
        .iter()
        .map(|a| {
            let field = if a.field.dot(&minus_a) > 1.0 - 1e-12 {
                HopfDirection::A
            } else {
                a.field
            };
            ArcSpec::new(field, a.length)
        })
        .collect::<Result<Vec<_>>>()?;
    PolygonSpec::new(arcs)
}

fn calibration(fault: bool) -> Result<(f64, String)> {
    let mut refs = lawson::calibration_references()?;
    if fault {
        refs = refs.iter().map(flip_minus_a).collect::<Result<_>>()?;
    }
    let oracle = Oracle::calibrate(&refs)?;
    let mut worst = 0.0_f64;
    for p in &refs {
        worst = worst.max(oracle.closure_defect(p)?);
    }
    Ok((worst, oracle.conventions().to_string()))
}

/// 50 angles in (0, π/2) ∪ (π/2, π), avoiding π/2.
fn beta_grid() -> Vec<f64> {
    (1..=50).map(|i| PI * (i as f64 - 0.5) / 50.0).collect()
}

fn open_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |j| lo + (hi - lo) * j as f64 / (n + 1) as f64)
}

fn family(beta: f64, r: f64) -> Result<lawson::LawsonQuad> {
    if beta < FRAC_PI_2 {
        lawson::from_r(beta, r)
    } else {
        lawson::from_r_obtuse(beta, r)
    }
}

fn lawson_residuals(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for beta in beta_grid() {
        for r in open_grid(0.0, FRAC_PI_2, 200) {
            c.track(family(beta, r)?.max_residual());
        }
        if beta < FRAC_PI_2 {
            let q = lawson::from_r(beta, FRAC_PI_4)?;
            c.require(
                [q.l, q.t, q.r, q.s] == [beta / 2.0, FRAC_PI_4, FRAC_PI_4, beta / 2.0],
                format!("midpoint at beta {beta}"),
            );
        }
    }
    Ok(c)
}

fn iso_points() -> Result<Vec<iso::IsoModuliPoint>> {
    let (alphas, rs) = iso::uniform_grid(20, 40);
    iso::sample_disk(&alphas, &rs)
}

fn closure(_tol: f64) -> Result<Check> {
    let oracle = calibrated()?;
    let mut c = Check::new();
    for beta in beta_grid() {
        for r in open_grid(0.0, FRAC_PI_2, 20) {
            c.track(oracle.closure_defect(&family(beta, r)?.polygon()?)?);
        }
    }
    for kind in [
        RightAngledKind::Complementary,
        RightAngledKind::Equal,
        RightAngledKind::Cylindrical,
    ] {
        for p in open_grid(0.0, FRAC_PI_4, 10) {
            c.track(oracle.closure_defect(&lawson::right_angled(kind, p)?.polygon()?)?);
        }
    }
    for p in rect::sample_moduli(12)?.points {
        c.track(p.closure_defect);
    }
    for p in iso_points()? {
        c.track(p.closure_defect);
    }
    for b in open_grid(-1.0, 1.0, 9) {
        for r in open_grid(0.0, FRAC_PI_2, 9) {
            c.track(oracle.closure_defect(&CliffordRect::new(b, r)?.polygon()?)?);
        }
    }
    Ok(c)
}

fn substitution_invariance(_tol: f64) -> Result<Check> {
    let oracle = calibrated()?;
    let mut c = Check::new();
    let mut polygons = Vec::new();
    for beta in [0.3, 1.2, 2.0, 2.9] {
        for r in [0.2, 0.7, 1.3] {
            polygons.push(family(beta, r)?.polygon()?);
        }
    }
    polygons.push(
        rect::moduli_point(0.2, 0.3, Sheet::Upper)?
            .pentagon
            .polygon()?,
    );
    polygons.push(
        iso::moduli_point(&DiskPoint::new(1.0, 0.5, Branch::B1)?)?
            .pentagon
            .polygon()?,
    );
    for p in &polygons {
        let base = oracle.closure_defect(p)?;
        for i in 0..p.len() {
            c.track(oracle.closure_defect(&p.with_extended_arc(i, TAU)?)? - base);
            for j in (i + 1)..p.len() {
                let q = p.with_extended_arc(i, PI)?.with_extended_arc(j, PI)?;
                c.track(oracle.closure_defect(&q)? - base);
            }
        }
    }
    Ok(c)
}

fn classification(_tol: f64) -> Result<Check> {
    use SubstitutionStep::*;
    let mut c = Check::new();
    let programs: [&[SubstitutionStep]; 5] = [
        &[],
        &[Add2Pi {
            edge: Edge::T,
            n: 1,
        }],
        &[PairPiSt, PairPiRs],
        &[
            ReverseR,
            Add2Pi {
                edge: Edge::S,
                n: 2,
            },
        ],
        &[PairPiRt, ReverseRAntipodal],
    ];
    let mut bases = Vec::new();
    for beta in [0.4, 1.1, 2.2, 3.0] {
        for r in [0.1, 0.6, 1.4] {
            bases.push(family(beta, r)?);
        }
    }
    bases.push(lawson::right_angled(RightAngledKind::Complementary, 0.3)?);
    bases.push(lawson::right_angled(RightAngledKind::Equal, 0.5)?);
    bases.push(lawson::right_angled(RightAngledKind::Cylindrical, 1.7)?);
    let mut classified = 0;
    for base in &bases {
        for program in programs {
            let mut q = *base;
            let mut valid = true;
            for &step in program {
                match lawson::apply_substitution(&q, step) {
                    Ok(n) => q = n,
                    Err(Error::InvalidSubstitution(_)) => {
                        valid = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if !valid {
                continue;
            }
            let back = lawson::classify(&q)?.reconstruct()?;
            for (a, b) in [
                (back.l, q.l),
                (back.t, q.t),
                (back.r, q.r),
                (back.s, q.s),
                (back.beta, q.beta),
            ] {
                c.track(a - b);
            }
            classified += 1;
        }
    }
    c.require(
        classified >= bases.len() * 3,
        format!("only {classified} classified"),
    );
    Ok(c)
}

fn rect_bound(tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let mut monotone = true;
    let mut equality_off_axis = 0;
    for l1 in open_grid(0.0, FRAC_PI_4, 100) {
        let mut prev: Option<(f64, f64)> = None;
        for r in open_grid(l1, FRAC_PI_2 - l1, 1000) {
            let l2 = rect::l2_from(l1, r)?;
            let sum = (2.0 * l1 + 2.0 * l2) / PI;
            c.track((sum - 0.5).max(0.0));
            if sum > 0.5 - tol && (r - FRAC_PI_4).abs() >= 1e-9 {
                equality_off_axis += 1;
            }
            if let Some((pr, pl2)) = prev {
                let rising = l2.partial_cmp(&pl2) == Some(std::cmp::Ordering::Greater);
                let falling = l2.partial_cmp(&pl2) == Some(std::cmp::Ordering::Less);
                if r <= FRAC_PI_4 && !rising || pr >= FRAC_PI_4 && !falling {
                    monotone = false;
                }
            }
            prev = Some((r, l2));
        }
    }
    c.require(monotone, "l2(r) strictly monotone on each sheet");
    c.require(
        equality_off_axis == 0,
        format!("{equality_off_axis} equality points off r = π/4"),
    );
    Ok(c)
}

fn rect_solve(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let mut counts_ok = true;
    for l1 in open_grid(0.0, FRAC_PI_4, 20) {
        for frac in open_grid(0.0, 1.0, 20) {
            let l2 = (FRAC_PI_4 - l1) * frac;
            let lo = rect::solve_r(l1, l2, Sheet::Lower)?;
            let hi = rect::solve_r(l1, l2, Sheet::Upper)?;
            c.track(rect::l2_from(l1, lo)? - l2);
            c.track(rect::l2_from(l1, hi)? - l2);
            counts_ok &= lo < FRAC_PI_4 && hi > FRAC_PI_4;
        }
        let on_diag = [Sheet::Lower, Sheet::Upper].map(|s| rect::solve_r(l1, FRAC_PI_4 - l1, s));
        counts_ok &= on_diag
            .iter()
            .all(|r| matches!(r, Ok(r) if *r == FRAC_PI_4));
    }
    c.require(
        counts_ok,
        "two roots inside the triangle, one on its diagonal",
    );
    c.require(
        matches!(
            rect::solve_r(PI / 6.0, PI / 6.0, Sheet::Lower),
            Err(Error::NoSolution(_))
        ),
        "NoSolution beyond the bound",
    );
    Ok(c)
}

fn rect_decompose(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for p in rect::sample_moduli(16)?.points {
        let d = rect::decompose(&p.pentagon)?;
        let q = d.pentagon()?;
        for (a, b) in q.lengths().iter().zip(p.pentagon.lengths()) {
            c.track(a - b);
        }
        c.track(d.r - p.r);
        c.require(d.beta >= 2.0 * p.pentagon.l1 - 1e-12, "beta >= 2 l1");
    }
    Ok(c)
}

fn dihedral(tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let mut max_l: f64 = 0.0;
    let mut arg_max = 0.0;
    for r in open_grid(0.0, FRAC_PI_2, 401) {
        let q = lawson::from_r(FRAC_PI_4, r)?;
        let p = rect::compose(&q, &q)?;
        c.require(p.l1 == p.l2 && p.t1 == p.t2, "symmetric pentagon");
        c.require(p.l1 <= PI / 8.0 + tol, format!("l = {} above π/8", p.l1));
        if p.l1 > max_l {
            max_l = p.l1;
            arg_max = r;
        }
    }
    c.track(max_l - PI / 8.0);
    c.require((arg_max - FRAC_PI_4).abs() < 1e-12, "maximum at r = π/4");
    let (rho1, rho2) = rect::compose(
        &lawson::from_r(FRAC_PI_4, FRAC_PI_4)?,
        &lawson::from_r(FRAC_PI_4, FRAC_PI_4)?,
    )?
    .neckradii()?;
    c.track(rho1 - 0.25);
    c.track(rho2 - 0.25);
    Ok(c)
}

fn iso_zero_set(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let mut bracket_ok = true;
    for alpha in open_grid(0.0, FRAC_PI_2, 60) {
        let big_r = iso::r_bound(alpha)?;
        for r in open_grid(0.0, big_r, 200) {
            let b1 = iso::solve_b1(alpha, r)?;
            let b2 = iso::solve_b2(alpha, r)?;
            c.track(iso::f(alpha, r, b1)?);
            c.track(iso::f(alpha, r, b2)?);
            c.track(b1 + b2 - alpha);
            bracket_ok &= b1 > alpha / 2.0 - FRAC_PI_4 && b1 <= alpha / 2.0;
        }
        c.track(iso::solve_b1(alpha, big_r)? - alpha / 2.0);
        // Beyond R(α) f keeps one sign across the whole b range.
        let r_max = iso::r_max(alpha)?;
        for r in open_grid(big_r, r_max, 20) {
            let values: Vec<f64> = open_grid(alpha / 2.0 - FRAC_PI_4, alpha / 2.0 + FRAC_PI_4, 200)
                .map(|b| iso::f(alpha, r, b))
                .collect::<Result<_>>()?;
            let pos = values.iter().any(|v| *v > 0.0);
            let neg = values.iter().any(|v| *v < 0.0);
            c.require(
                !(pos && neg),
                format!("sign change at α = {alpha}, r = {r} > R(α)"),
            );
        }
    }
    c.require(bracket_ok, "b1 in (α/2 − π/4, α/2]");
    Ok(c)
}

fn sigma(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let a = iso::alpha_sigma();
    c.track(iso::r_bound(a)? - FRAC_PI_4);
    c.track(iso::balance_l(a, FRAC_PI_4)? - FRAC_PI_4);
    let p = iso::moduli_point(&DiskPoint::new(a, FRAC_PI_4, Branch::Axis)?)?;
    c.track(p.rho_a - 0.25);
    c.track(p.rho_s - 0.5);
    Ok(c)
}

fn iso_bounds(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let mut excess: f64 = 0.0;
    for p in iso_points()? {
        let b = iso::neckradius_bounds(p.alpha)?;
        excess = excess
            .max(p.rho_a - b.rho_a_max)
            .max(p.rho_s - b.rho_s_max)
            .max(2.0 * p.rho_a + p.rho_s - b.sum_max);
        if p.branch == Branch::Axis {
            c.track(p.rho_a - b.rho_a_max);
        }
    }
    c.require(excess <= 1e-12, format!("bound exceeded by {excess:e}"));
    Ok(c)
}

fn balancing_suite(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    for p in iso_points()? {
        c.track(p.l * (PI - 2.0 * p.l) - p.alpha.cos() * p.r * (PI - p.r));
        let ends = balancing::isosceles_triple(p.alpha, p.rho_s, p.rho_a)?;
        c.track(balancing::balance_residual(&ends)?);
    }
    for p in rect::sample_moduli(12)?.points {
        let ends = balancing::rectangular_cross(p.rho1, p.rho2)?;
        c.track(balancing::balance_residual(&ends)?);
    }
    Ok(c)
}

fn axis_limits(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let a_sigma = iso::alpha_sigma();
    for alpha in open_grid(0.0, FRAC_PI_2, 12) {
        if (alpha - a_sigma).abs() < 0.05 {
            continue;
        }
        let (q1, q2) = iso::axis_limits(alpha, 1e-12)?;
        let jump = if alpha < a_sigma { PI } else { 0.0 };
        c.track(q2.s - q1.s - jump);
        c.track(q2.t - q1.t - jump);
    }
    Ok(c)
}

/// Richardson-extrapolated central difference of f in b, with a bound on
/// its rounding error.
pub fn fd_df_db(alpha: f64, r: f64, b: f64, h: f64) -> Result<(f64, f64)> {
    let d = |h: f64| -> Result<(f64, f64)> {
        let (fp, fm) = (iso::f(alpha, r, b + h)?, iso::f(alpha, r, b - h)?);
        Ok((
            (fp - fm) / (2.0 * h),
            4.0 * f64::EPSILON * (fp.abs() + fm.abs() + 1.0) / (2.0 * h),
        ))
    };
    let (d1, e1) = d(h)?;
    let (d2, e2) = d(0.5 * h)?;
    Ok(((4.0 * d2 - d1) / 3.0, (4.0 * e2 + e1) / 3.0))
}

/// Uniform random point of Ω.
pub fn random_omega_point(rng: &mut ChaCha8Rng) -> Result<(f64, f64, f64)> {
    let alpha = rng.gen_range(f64::EPSILON..FRAC_PI_2);
    let r = rng.gen_range(0.0..=iso::r_max(alpha)?);
    let b = rng.gen_range((alpha / 2.0 - FRAC_PI_4)..=(alpha / 2.0 + FRAC_PI_4));
    Ok((alpha, r, b))
}

fn gradient(tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sign_law = true;
    let mut skipped = 0;
    let n = 10_000;
    for _ in 0..n {
        let (alpha, r, b) = random_omega_point(&mut rng)?;
        let exact = iso::df_db(alpha, r, b);
        let (fd, rounding) = fd_df_db(alpha, r, b, 0.02)?;
        // Where |∂f/∂b| is below the rounding noise of f no quotient resolves it.
        if rounding > 0.1 * tol * exact.abs() {
            skipped += 1;
        } else {
            c.track((fd - exact) / exact);
        }
        // Negative on the b1 half of the range, positive on the mirror half.
        let expect = (b - alpha / 2.0).signum();
        sign_law &= exact == 0.0 || exact.signum() == expect;
    }
    c.require(sign_law, "sign of ∂f/∂b follows b − α/2");
    c.require(
        skipped * 100 < n,
        format!("{skipped} of {n} points below rounding resolution"),
    );
    Ok(c)
}

fn monodromy(_tol: f64) -> Result<Check> {
    let mut c = Check::new();
    let center = [iso::alpha_sigma(), FRAC_PI_4];
    let cases = [
        (center, 1, 1),
        ([center[0] + 0.3, center[1]], 1, 0),
        (center, 2, 2),
    ];
    for (ctr, turns, expect) in cases {
        let n = iso::monodromy(&iso::chart_circle(ctr, 0.05, 64, turns))?;
        c.track((n.abs() - expect) as f64);
    }
    Ok(c)
}
