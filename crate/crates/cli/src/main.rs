//! `cmc-moduli`: sample, solve and verify great-circle contours of CMC surfaces.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use render::Format;

#[derive(Debug, Parser)]
#[command(name = "cmc-moduli", version, about)]
pub struct Cli {
    /// Read angle and length inputs in degrees. Output is always radians.
    #[arg(long, global = true)]
    pub degrees: bool,

    /// Output format; sampling defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lawson quadrilaterals.
    #[command(subcommand)]
    Lawson(LawsonCmd),
    /// Rectangular pentagon contours (four-ended surfaces).
    #[command(subcommand)]
    Rect(RectCmd),
    /// Isosceles pentagon contours (three-ended surfaces).
    #[command(subcommand)]
    Iso(IsoCmd),
    /// Calibrate the closure oracle and run every invariant suite.
    VerifyAll(VerifyAllArgs),
}

#[derive(Debug, Subcommand)]
pub enum LawsonCmd {
    /// Build a quadrilateral from (β, r) or a right-angled family.
    Construct(ConstructArgs),
    /// Reduce a quadrilateral to a base family plus substitutions.
    Classify(QuadArgs),
    /// Report the four residuals and the oracle closure defect.
    Verify(QuadArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Angle between the diagonal and the t arc.
    #[arg(long, requires = "r", conflicts_with_all = ["right", "param"])]
    pub beta: Option<f64>,
    /// Length of the diagonal arc r.
    #[arg(long, requires = "beta")]
    pub r: Option<f64>,
    /// Right-angled family.
    #[arg(long, value_enum, requires = "param")]
    pub right: Option<RightKind>,
    /// l for complementary and equal, s for cylindrical.
    #[arg(long, requires = "right")]
    pub param: Option<f64>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum RightKind {
    Complementary,
    Equal,
    Cylindrical,
}

/// A quadrilateral given inline or as a JSON record.
#[derive(Debug, Args)]
pub struct QuadArgs {
    /// JSON file holding {"l", "t", "r", "s", "beta"} in radians.
    #[arg(long, conflicts_with_all = ["l", "t", "r", "s", "beta"])]
    pub quad: Option<PathBuf>,
    #[arg(long, requires_all = ["t", "r", "s", "beta"])]
    pub l: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum RectCmd {
    /// Sample the two-sheeted neckradius triangle.
    Sample {
        /// Grid nodes per unit of 2ρ; spacing is 1/(2N).
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
    },
    /// Solve for the diagonal length r given the neck lengths.
    Solve {
        #[arg(long)]
        l1: f64,
        #[arg(long)]
        l2: f64,
        /// Sheet to solve on; both when omitted.
        #[arg(long, value_enum)]
        sheet: Option<SheetArg>,
    },
    /// Extend a pentagon to a doubly periodic contour.
    Periodic {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_8)]
        l1: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_8)]
        l2: f64,
        #[arg(long, value_enum, default_value_t = SheetArg::Lower)]
        sheet: SheetArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SheetArg {
    Lower,
    Upper,
}

#[derive(Debug, Subcommand)]
pub enum IsoCmd {
    /// Sample both branches over an open uniform (α, r) grid.
    Sample {
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(2..))]
        alpha_grid: u32,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(2..))]
        r_grid: u32,
    },
    /// Resolve one point of the disk into a closed contour.
    Solve {
        #[arg(long)]
        alpha: f64,
        /// Defaults to R(α) on the axis branch.
        #[arg(long, required_unless_present = "branch")]
        r: Option<f64>,
        #[arg(long, value_enum)]
        branch: Option<BranchArg>,
    },
    /// Neckradius bounds at opening angle α.
    Bounds {
        #[arg(long)]
        alpha: f64,
    },
    /// Winding number of a loop around σ.
    Monodromy {
        /// JSON array of [alpha, u] chart points; u > R(α) lies on b2.
        #[arg(long = "loop")]
        loop_file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BranchArg {
    B1,
    B2,
    Axis,
}

#[derive(Debug, Args)]
pub struct VerifyAllArgs {
    /// Use this tolerance for every suite.
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
    /// Test hook: corrupt a field sign in the calibration references.
    #[arg(long, hide = true)]
    pub inject_field_sign_fault: bool,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CMC_MODULI_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CMC_MODULI_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(commands::Failure::Math(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(outcome.text.as_bytes())
                .map_err(|e| e.to_string())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
