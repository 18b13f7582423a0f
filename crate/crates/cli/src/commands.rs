//! Subcommand implementations. Each returns the rendered output and whether
//! the run counts as a success.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use cmc_moduli::export::{fmt_f64, to_csv, IsoRow, RectRow};
use cmc_moduli::isosceles::{self as iso, Branch, DiskPoint};
use cmc_moduli::lawson::{self, LawsonQuad, RightAngledKind, RESIDUAL_TOL};
use cmc_moduli::rectangular::{self as rect, Sheet};
use cmc_moduli::s3_oracle::{calibrated, CLOSURE_TOL};
use cmc_moduli::verify::{verify_all, VerifyOptions};
use cmc_moduli::Error;
use serde::Serialize;

use crate::render::{csv_record, csv_table, json, Format};
use crate::{
    BranchArg, Cli, Command, ConstructArgs, IsoCmd, LawsonCmd, QuadArgs, RectCmd, RightKind,
    SheetArg, VerifyAllArgs,
};

pub enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, ok: true }
    }
}

type Run = Result<Outcome, Failure>;

struct Ctx {
    degrees: bool,
    format: Option<Format>,
}

impl Ctx {
    fn angle(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_radians()
        } else {
            x
        }
    }

    /// Renders a single record; json unless csv was asked for.
    fn record<T: Serialize>(&self, value: &T) -> String {
        match self.format {
            Some(Format::Csv) => csv_record(value),
            _ => json(value),
        }
    }
}

pub fn run(cli: &Cli) -> Run {
    let ctx = Ctx {
        degrees: cli.degrees,
        format: cli.format,
    };
    match &cli.command {
        Command::Lawson(cmd) => lawson_cmd(&ctx, cmd),
        Command::Rect(cmd) => rect_cmd(&ctx, cmd),
        Command::Iso(cmd) => iso_cmd(&ctx, cmd),
        Command::VerifyAll(args) => verify_all_cmd(&ctx, args),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", path.display())))
}

// ---- lawson ---------------------------------------------------------------

fn lawson_cmd(ctx: &Ctx, cmd: &LawsonCmd) -> Run {
    match cmd {
        LawsonCmd::Construct(args) => construct(ctx, args),
        LawsonCmd::Classify(args) => {
            let q = quad_input(ctx, args)?;
            Ok(Outcome::ok(ctx.record(&lawson::classify(&q)?)))
        }
        LawsonCmd::Verify(args) => lawson_verify(ctx, args),
    }
}

fn construct(ctx: &Ctx, args: &ConstructArgs) -> Run {
    let q = match (args.beta, args.r, args.right, args.param) {
        (Some(beta), Some(r), None, None) => {
            let (beta, r) = (ctx.angle(beta), ctx.angle(r));
            if beta > FRAC_PI_2 {
                lawson::from_r_obtuse(beta, r)?
            } else {
                lawson::from_r(beta, r)?
            }
        }
        (None, None, Some(kind), Some(param)) => {
            let kind = match kind {
                RightKind::Complementary => RightAngledKind::Complementary,
                RightKind::Equal => RightAngledKind::Equal,
                RightKind::Cylindrical => RightAngledKind::Cylindrical,
            };
            lawson::right_angled(kind, ctx.angle(param))?
        }
        _ => {
            return Err(Failure::Usage(
                "give either --beta and --r, or --right and --param".into(),
            ))
        }
    };
    Ok(Outcome::ok(ctx.record(&q)))
}

fn quad_input(ctx: &Ctx, args: &QuadArgs) -> Result<LawsonQuad, Failure> {
    if let Some(path) = &args.quad {
        return read_json(path);
    }
    match (args.l, args.t, args.r, args.s, args.beta) {
        (Some(l), Some(t), Some(r), Some(s), Some(beta)) => Ok(LawsonQuad::new(
            ctx.angle(l),
            ctx.angle(t),
            ctx.angle(r),
            ctx.angle(s),
            ctx.angle(beta),
        )?),
        _ => Err(Failure::Usage(
            "give --quad FILE or all of --l --t --r --s --beta".into(),
        )),
    }
}

#[derive(Serialize)]
struct LawsonVerifyReport {
    quad: LawsonQuad,
    residuals: [f64; 4],
    max_residual: f64,
    residual_tol: f64,
    closure_defect: f64,
    closure_tol: f64,
    passed: bool,
}

fn lawson_verify(ctx: &Ctx, args: &QuadArgs) -> Run {
    let quad = quad_input(ctx, args)?;
    let closure_defect = calibrated()?.closure_defect(&quad.polygon()?)?;
    let residuals = quad.residuals();
    let max_residual = quad.max_residual();
    let passed = max_residual < RESIDUAL_TOL && closure_defect < CLOSURE_TOL;
    let report = LawsonVerifyReport {
        quad,
        residuals,
        max_residual,
        residual_tol: RESIDUAL_TOL,
        closure_defect,
        closure_tol: CLOSURE_TOL,
        passed,
    };
    Ok(Outcome {
        text: ctx.record(&report),
        ok: passed,
    })
}

// ---- rect -----------------------------------------------------------------

fn sheet(s: SheetArg) -> Sheet {
    match s {
        SheetArg::Lower => Sheet::Lower,
        SheetArg::Upper => Sheet::Upper,
    }
}

#[derive(Serialize)]
struct RectSampleOut {
    resolution: usize,
    excluded_boundary_nodes: usize,
    boundary_note: String,
    points: Vec<RectRow>,
}

#[derive(Serialize)]
struct RectSolution {
    sheet: Sheet,
    r: f64,
    beta: f64,
    closure_defect: f64,
}

#[derive(Serialize)]
struct RectSolveOut {
    l1: f64,
    l2: f64,
    solutions: Vec<RectSolution>,
}

#[derive(Serialize)]
struct PeriodicOut {
    m: u32,
    n: u32,
    base: rect::RectPentagon,
    base_closure_defect: f64,
    extended: rect::RectPentagon,
}

fn rect_cmd(ctx: &Ctx, cmd: &RectCmd) -> Run {
    match cmd {
        RectCmd::Sample { grid } => {
            let sample = rect::sample_moduli(*grid as usize)?;
            let rows: Vec<RectRow> = sample.points.iter().map(RectRow::from).collect();
            let ok = rows.iter().all(|r| r.closure_defect < CLOSURE_TOL);
            let text = match ctx.format {
                Some(Format::Json) => json(&RectSampleOut {
                    resolution: sample.resolution,
                    excluded_boundary_nodes: sample.excluded_boundary_nodes,
                    boundary_note: sample.boundary_note,
                    points: rows,
                }),
                _ => to_csv(&rows),
            };
            Ok(Outcome { text, ok })
        }
        RectCmd::Solve { l1, l2, sheet: s } => {
            let (l1, l2) = (ctx.angle(*l1), ctx.angle(*l2));
            let sheets = match s {
                Some(s) => vec![sheet(*s)],
                None => vec![Sheet::Lower, Sheet::Upper],
            };
            let mut solutions = Vec::new();
            for s in sheets {
                let p = rect::moduli_point(l1, l2, s)?;
                solutions.push(RectSolution {
                    sheet: s,
                    r: p.r,
                    beta: p.beta,
                    closure_defect: p.closure_defect,
                });
            }
            let text = match ctx.format {
                Some(Format::Csv) => csv_table(
                    &["l1", "l2", "sheet", "r", "beta", "closure_defect"],
                    &solutions
                        .iter()
                        .map(|s| {
                            vec![
                                fmt_f64(l1),
                                fmt_f64(l2),
                                s.sheet.as_str().to_string(),
                                fmt_f64(s.r),
                                fmt_f64(s.beta),
                                fmt_f64(s.closure_defect),
                            ]
                        })
                        .collect::<Vec<_>>(),
                ),
                _ => json(&RectSolveOut { l1, l2, solutions }),
            };
            Ok(Outcome::ok(text))
        }
        RectCmd::Periodic {
            m,
            n,
            l1,
            l2,
            sheet: s,
        } => {
            let base = rect::moduli_point(ctx.angle(*l1), ctx.angle(*l2), sheet(*s))?;
            let contour = rect::doubly_periodic(&base.pentagon, *m, *n)?;
            Ok(Outcome::ok(ctx.record(&PeriodicOut {
                m: contour.m,
                n: contour.n,
                base: contour.base,
                base_closure_defect: base.closure_defect,
                extended: contour.extended(),
            })))
        }
    }
}

// ---- iso ------------------------------------------------------------------

#[derive(Serialize)]
struct BoundsOut {
    alpha: f64,
    r_bound: f64,
    r_max: f64,
    rho_a_max: f64,
    rho_s_max: f64,
    sum_max: f64,
}

#[derive(Serialize)]
struct MonodromyOut {
    monodromy: i64,
    crossings: Vec<iso::Crossing>,
}

fn iso_cmd(ctx: &Ctx, cmd: &IsoCmd) -> Run {
    match cmd {
        IsoCmd::Sample { alpha_grid, r_grid } => {
            let (alphas, rs) = iso::uniform_grid(*alpha_grid as usize, *r_grid as usize);
            let points = iso::sample_disk(&alphas, &rs)?;
            let rows: Vec<IsoRow> = points.iter().map(IsoRow::from).collect();
            let ok = rows.iter().all(|r| r.closure_defect < CLOSURE_TOL);
            let text = match ctx.format {
                Some(Format::Json) => json(&rows),
                _ => to_csv(&rows),
            };
            Ok(Outcome { text, ok })
        }
        IsoCmd::Solve { alpha, r, branch } => {
            let alpha = ctx.angle(*alpha);
            let branch = match branch {
                Some(BranchArg::B2) => Branch::B2,
                Some(BranchArg::Axis) => Branch::Axis,
                Some(BranchArg::B1) | None => Branch::B1,
            };
            let r = match r {
                Some(r) => ctx.angle(*r),
                None => iso::r_bound(alpha)?,
            };
            let p = iso::moduli_point(&DiskPoint::new(alpha, r, branch)?)?;
            Ok(Outcome {
                ok: p.closure_defect < CLOSURE_TOL,
                text: ctx.record(&p),
            })
        }
        IsoCmd::Bounds { alpha } => {
            let alpha = ctx.angle(*alpha);
            let b = iso::neckradius_bounds(alpha)?;
            Ok(Outcome::ok(ctx.record(&BoundsOut {
                alpha,
                r_bound: iso::r_bound(alpha)?,
                r_max: iso::r_max(alpha)?,
                rho_a_max: b.rho_a_max,
                rho_s_max: b.rho_s_max,
                sum_max: b.sum_max,
            })))
        }
        IsoCmd::Monodromy { loop_file } => {
            let raw: Vec<[f64; 2]> = read_json(loop_file)?;
            let chart: Vec<[f64; 2]> = raw.iter().map(|p| p.map(|x| ctx.angle(x))).collect();
            let crossings = iso::monodromy_crossings(&chart)?;
            let monodromy = crossings.iter().map(|c| c.sign).sum();
            let text = match ctx.format {
                Some(Format::Json) => json(&MonodromyOut {
                    monodromy,
                    crossings,
                }),
                Some(Format::Csv) => csv_table(&["monodromy"], &[vec![monodromy.to_string()]]),
                None => format!("{monodromy}\n"),
            };
            Ok(Outcome::ok(text))
        }
    }
}

// ---- verify-all -----------------------------------------------------------

#[derive(Serialize)]
struct SuiteRow<'a> {
    name: &'a str,
    passed: bool,
    worst: f64,
    tolerance: f64,
    detail: &'a str,
}

fn verify_all_cmd(ctx: &Ctx, args: &VerifyAllArgs) -> Run {
    let report = verify_all(&VerifyOptions {
        tol: args.tol,
        inject_field_sign_fault: args.inject_field_sign_fault,
    });
    let rows: Vec<SuiteRow> = report
        .suites
        .iter()
        .map(|s| SuiteRow {
            name: s.name,
            passed: s.passed,
            worst: s.worst,
            tolerance: s.tolerance,
            detail: &s.detail,
        })
        .collect();
    let text = match ctx.format {
        None => report.render(),
        Some(Format::Json) => json(&rows),
        Some(Format::Csv) => csv_table(
            &["suite", "passed", "worst", "tolerance", "detail"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.to_string(),
                        r.passed.to_string(),
                        fmt_f64(r.worst),
                        fmt_f64(r.tolerance),
                        r.detail.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    if let Some(failure) = report
        .suites
        .iter()
        .find(|s| s.name == "calibration" && s.detail.starts_with("CalibrationFailure"))
    {
        eprintln!("error: {}", failure.detail);
    }
    Ok(Outcome {
        text,
        ok: report.passed(),
    })
}
