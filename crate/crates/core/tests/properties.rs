//! Property tests for the invariants of every module.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use cmc_moduli::balancing::{
    balance_residual, force_magnitude, isosceles_triple, rectangular_cross,
};
use cmc_moduli::isosceles::{self as iso, Branch, DiskPoint};
use cmc_moduli::lawson::{
    self, apply_substitution, classify, Edge, LawsonQuad, RightAngledKind, SubstitutionStep,
};
use cmc_moduli::rectangular::{self as rect, Sheet};
use cmc_moduli::s3_oracle::{calibrated, HopfDirection, PolygonSpec};
use proptest::prelude::*;

fn defect(p: &PolygonSpec) -> f64 {
    calibrated().unwrap().closure_defect(p).unwrap()
}

fn family(beta: f64, r: f64) -> LawsonQuad {
    if beta < FRAC_PI_2 {
        lawson::from_r(beta, r).unwrap()
    } else {
        lawson::from_r_obtuse(beta, r).unwrap()
    }
}

/// β in (0, π) away from π/2, r in (0, π/2).
fn quad_params() -> impl Strategy<Value = (f64, f64)> {
    (
        prop_oneof![0.01..FRAC_PI_2 - 0.01, FRAC_PI_2 + 0.01..PI - 0.01],
        0.001..FRAC_PI_2 - 0.001,
    )
}

fn step() -> impl Strategy<Value = SubstitutionStep> {
    let edge = prop_oneof![Just(Edge::R), Just(Edge::S), Just(Edge::T)];
    prop_oneof![
        (edge, 1u32..3).prop_map(|(edge, n)| SubstitutionStep::Add2Pi { edge, n }),
        Just(SubstitutionStep::PairPiSt),
        Just(SubstitutionStep::PairPiRt),
        Just(SubstitutionStep::PairPiRs),
    ]
}

/// Unit field at polar/azimuth angles.
fn field() -> impl Strategy<Value = HopfDirection> {
    (0.0..PI, 0.0..TAU).prop_map(|(th, ph)| {
        HopfDirection::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()).unwrap()
    })
}

fn polygon() -> impl Strategy<Value = PolygonSpec> {
    prop::collection::vec((field(), 0.01..3.0), 3..7)
        .prop_map(|arcs| PolygonSpec::from_pairs(&arcs).unwrap())
}

/// Chart point (α, u) strictly inside D.
fn disk_point() -> impl Strategy<Value = DiskPoint> {
    (0.02..FRAC_PI_2 - 0.02, 0.001..0.999).prop_map(|(alpha, frac)| {
        let big_r = iso::r_bound(alpha).unwrap();
        DiskPoint::from_chart(alpha, 2.0 * big_r * frac).unwrap()
    })
}

fn perpendicular_vertices(p: &PolygonSpec) -> usize {
    let arcs = p.arcs();
    (0..arcs.len())
        .filter(|&i| arcs[i].field.dot(&arcs[(i + 1) % arcs.len()].field).abs() < 1e-12)
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // ---- oracle ----------------------------------------------------------

    #[test]
    fn period_invariance(p in polygon(), k in 0usize..7) {
        let i = k % p.len();
        let d = defect(&p);
        prop_assert!((defect(&p.with_extended_arc(i, TAU).unwrap()) - d).abs() < 1e-12);
    }

    #[test]
    fn pair_pi_invariance(p in polygon(), i in 0usize..7, j in 0usize..7) {
        let (i, j) = (i % p.len(), j % p.len());
        prop_assume!(i != j);
        let q = p.with_extended_arc(i, PI).unwrap().with_extended_arc(j, PI).unwrap();
        prop_assert!((defect(&q) - defect(&p)).abs() < 1e-12);
    }

    #[test]
    fn cyclic_invariance(p in polygon(), k in 1usize..7) {
        prop_assert!((defect(&p.rotated(k).unwrap()) - defect(&p)).abs() < 1e-12);
    }

    // ---- lawson ----------------------------------------------------------

    #[test]
    fn family_residuals_and_closure((beta, r) in quad_params()) {
        let q = family(beta, r);
        prop_assert!(q.max_residual() < 1e-10);
        let p = q.polygon().unwrap();
        prop_assert!(defect(&p) < 1e-9);
        prop_assert_eq!(perpendicular_vertices(&p), 3);
    }

    #[test]
    fn obtuse_duality((beta, r) in (0.01..FRAC_PI_2 - 0.01, 0.001..FRAC_PI_2 - 0.001)) {
        let a = lawson::from_r(beta, r).unwrap();
        let o = lawson::from_r_obtuse(PI - beta, r).unwrap();
        prop_assert!((o.l - a.l).abs() < 1e-12);
        prop_assert!((o.s - (PI - a.s)).abs() < 1e-12);
        prop_assert!((o.t - (PI - a.t)).abs() < 1e-12);
    }

    #[test]
    fn substitutions_preserve_membership(
        (beta, r) in quad_params(),
        steps in prop::collection::vec(step(), 0..4),
        reverse in any::<bool>(),
    ) {
        let mut q = family(beta, r);
        // Reversal needs r < 2π, so it goes first.
        if reverse {
            q = apply_substitution(&q, SubstitutionStep::ReverseR).unwrap();
            prop_assert!(q.beta > PI);
        }
        for s in steps {
            q = apply_substitution(&q, s).unwrap();
            prop_assert!(q.max_residual() < 1e-10);
            prop_assert!(defect(&q.polygon().unwrap()) < 1e-9);
        }
        // β in (0, π) keeps r mod π in (0, π/2); β in (π, 2π) puts it in (π/2, π).
        let m = q.r % PI;
        if q.beta < PI {
            prop_assert!(m > 0.0 && m < FRAC_PI_2);
        } else {
            prop_assert!(m > FRAC_PI_2 && m < PI);
        }
        let c = classify(&q).unwrap();
        let back = c.reconstruct().unwrap();
        for (x, y) in [(back.l, q.l), (back.t, q.t), (back.r, q.r), (back.s, q.s), (back.beta, q.beta)] {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn right_angled_families_close(l in 0.01..FRAC_PI_4, s in 0.01..3.0) {
        for (kind, p) in [
            (RightAngledKind::Complementary, l),
            (RightAngledKind::Equal, l),
            (RightAngledKind::Cylindrical, s),
        ] {
            let q = lawson::right_angled(kind, p).unwrap();
            prop_assert!(q.max_residual() < 1e-12);
            prop_assert!(defect(&q.polygon().unwrap()) < 1e-9);
        }
    }

    // ---- rectangular -----------------------------------------------------

    #[test]
    fn rect_bound_and_angle(l1 in 0.005..FRAC_PI_4 - 0.005, frac in 0.001..0.999) {
        let r = l1 + (FRAC_PI_2 - 2.0 * l1) * frac;
        let l2 = rect::l2_from(l1, r).unwrap();
        prop_assert!(2.0 * (l1 + l2) / PI <= 0.5 + 1e-12);
        prop_assert!(rect::beta_from(l1, r).unwrap() >= 2.0 * l1 - 1e-15);
    }

    #[test]
    fn decompose_inverts_compose(
        l1 in 0.01..FRAC_PI_4 - 0.01,
        frac in 0.01..0.99,
        upper in any::<bool>(),
    ) {
        let l2 = (FRAC_PI_4 - l1) * frac;
        let sheet = if upper { Sheet::Upper } else { Sheet::Lower };
        let m = rect::moduli_point(l1, l2, sheet).unwrap();
        prop_assert!(m.closure_defect < 1e-9);
        prop_assert_eq!(perpendicular_vertices(&m.pentagon.polygon().unwrap()), 5);
        let d = rect::decompose(&m.pentagon).unwrap();
        prop_assert!((d.r - m.r).abs() < 1e-9);
        let p = d.pentagon().unwrap();
        for (x, y) in p.lengths().iter().zip(m.pentagon.lengths()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        let cross = rectangular_cross(m.rho1, m.rho2).unwrap();
        prop_assert!(balance_residual(&cross).unwrap() < 1e-12);
    }

    // ---- isosceles -------------------------------------------------------

    #[test]
    fn zero_set_branches(alpha in 0.01..FRAC_PI_2 - 0.01, frac in 0.001..0.999) {
        let r = iso::r_bound(alpha).unwrap() * frac;
        let b1 = iso::solve_b1(alpha, r).unwrap();
        let b2 = iso::solve_b2(alpha, r).unwrap();
        prop_assert!(b1 > alpha / 2.0 - FRAC_PI_4 && b1 <= alpha / 2.0);
        prop_assert!(b2 >= alpha / 2.0 && b2 < alpha / 2.0 + FRAC_PI_4);
        prop_assert!((b1 + b2 - alpha).abs() < 1e-12);
        prop_assert!(iso::f(alpha, r, b1).unwrap().abs() < 1e-12);
        prop_assert!(iso::f(alpha, r, b2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn moduli_points_close_and_balance(p in disk_point()) {
        let m = iso::moduli_point(&p).unwrap();
        prop_assert!(m.f_residual < 1e-12);
        prop_assert!(m.closure_defect < 1e-9);
        prop_assert_eq!(perpendicular_vertices(&m.pentagon.polygon().unwrap()), 5);
        let eq18 = m.l * (PI - 2.0 * m.l) - m.alpha.cos() * m.r * (PI - m.r);
        prop_assert!(eq18.abs() < 1e-12);
        let stem = force_magnitude(m.rho_s);
        let arm = force_magnitude(m.rho_a);
        prop_assert!((stem - 2.0 * m.alpha.cos() * arm).abs() < 1e-12);
        let ends = isosceles_triple(m.alpha, m.rho_s, m.rho_a).unwrap();
        prop_assert!(balance_residual(&ends).unwrap() < 1e-12);
        let bounds = iso::neckradius_bounds(m.alpha).unwrap();
        prop_assert!(m.rho_a <= bounds.rho_a_max + 1e-12);
        prop_assert!(m.rho_s <= bounds.rho_s_max + 1e-12);
        prop_assert!(2.0 * m.rho_a + m.rho_s <= bounds.sum_max + 1e-12);
    }

    #[test]
    fn l_is_continuous_in_the_chart(p in disk_point(), da in -1e-3..1e-3f64, du in -1e-3..1e-3f64) {
        let [a, u] = p.chart().unwrap();
        let Ok(q) = DiskPoint::from_chart(a + da, u + du) else { return Ok(()); };
        let l0 = iso::quad_for(&p).unwrap().l;
        let l1 = iso::quad_for(&q).unwrap().l;
        prop_assert!((l1 - l0).abs() <= 10.0 * da.hypot(du) + 1e-12);
    }

    // ---- balancing -------------------------------------------------------

    #[test]
    fn force_neck_bulge_duality(rho in 0.0..1.0f64) {
        prop_assert!((force_magnitude(rho) - force_magnitude(1.0 - rho)).abs() < 1e-14);
    }
}

#[test]
fn lawson_monotonicity() {
    for beta in [0.2, 0.7, 1.2, 1.5] {
        let lower: Vec<LawsonQuad> = (1..=400)
            .map(|j| lawson::from_r(beta, FRAC_PI_4 * j as f64 / 400.0).unwrap())
            .collect();
        let upper: Vec<LawsonQuad> = (0..400)
            .map(|j| lawson::from_r(beta, FRAC_PI_4 + FRAC_PI_4 * j as f64 / 400.0).unwrap())
            .collect();
        let strict =
            |xs: &[f64]| xs.windows(2).all(|w| w[1] > w[0]) || xs.windows(2).all(|w| w[1] < w[0]);
        for half in [&lower, &upper] {
            assert!(
                strict(&half.iter().map(|q| q.s).collect::<Vec<_>>()),
                "s, β = {beta}"
            );
            assert!(
                strict(&half.iter().map(|q| q.t).collect::<Vec<_>>()),
                "t, β = {beta}"
            );
        }
        assert!(
            lower.windows(2).all(|w| w[1].l > w[0].l),
            "l rises, β = {beta}"
        );
        assert!(
            upper.windows(2).all(|w| w[1].l < w[0].l),
            "l falls, β = {beta}"
        );
        assert_eq!(lower.last().unwrap().l, beta / 2.0);
    }
}

#[test]
fn rect_sheet_endpoints_degenerate() {
    for l1 in [0.05, 0.3, 0.7] {
        for r in [l1 * (1.0 + 1e-10), (FRAC_PI_2 - l1) * (1.0 - 1e-10)] {
            assert!(rect::l2_from(l1, r).unwrap() < 1e-4, "l1 = {l1}, r = {r}");
        }
    }
}

#[test]
fn rect_l2_monotone_on_fine_grids() {
    for l1 in [0.02, 0.2, 0.5, 0.78] {
        let (lo, hi) = (l1, FRAC_PI_2 - l1);
        let grid: Vec<f64> = (1..1000)
            .map(|j| lo + (hi - lo) * j as f64 / 1000.0)
            .collect();
        let vals: Vec<(Sheet, f64)> = grid
            .iter()
            .map(|&r| (Sheet::of(r), rect::l2_from(l1, r).unwrap()))
            .collect();
        for w in vals.windows(2) {
            match (w[0].0, w[1].0) {
                (Sheet::Lower, Sheet::Lower) => assert!(w[1].1 > w[0].1),
                (Sheet::Upper, Sheet::Upper) => assert!(w[1].1 < w[0].1),
                _ => {}
            }
        }
    }
}

#[test]
fn st_jump_only_below_sigma() {
    let a_sigma = iso::alpha_sigma();
    for alpha in [0.1, 0.4, 0.7, 0.95, 1.2, 1.5] {
        let (q1, q2) = iso::axis_limits(alpha, 1e-12).unwrap();
        let jump = if alpha < a_sigma { PI } else { 0.0 };
        assert!((q2.s - q1.s - jump).abs() < 1e-9, "s at α = {alpha}");
        assert!((q2.t - q1.t - jump).abs() < 1e-9, "t at α = {alpha}");
    }
}

#[test]
fn contours_degenerate_at_the_boundary() {
    for alpha in [0.2, 0.8, 1.4] {
        for r in [1e-4, 1e-7] {
            for branch in [Branch::B1, Branch::B2] {
                let m = iso::moduli_point(&DiskPoint::new(alpha, r, branch).unwrap()).unwrap();
                assert!(m.rho_s < 10.0 * r, "α = {alpha}, r = {r}");
                assert!(m.closure_defect < 1e-9);
            }
        }
    }
    // Small α squeezes the whole disk toward r = 0.
    let m = iso::moduli_point(&DiskPoint::new(1e-3, 1e-7, Branch::B1).unwrap()).unwrap();
    assert!(m.rho_s < 1e-6);
}
