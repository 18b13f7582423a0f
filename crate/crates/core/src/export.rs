//! Flat output records for sampled moduli spaces.

use serde::{Deserialize, Serialize};

use crate::isosceles::IsoModuliPoint;
use crate::rectangular::RectModuliPoint;

/// Scientific notation with 17 significant digits; round-trips every double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub trait Record {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectRow {
    pub rho1: f64,
    pub rho2: f64,
    pub sheet: String,
    pub r: f64,
    pub beta: f64,
    pub l1: f64,
    pub t1: f64,
    pub s: f64,
    pub l2: f64,
    pub t2: f64,
    pub closure_defect: f64,
}

impl From<&RectModuliPoint> for RectRow {
    fn from(p: &RectModuliPoint) -> Self {
        Self {
            rho1: p.rho1,
            rho2: p.rho2,
            sheet: p.sheet.as_str().to_string(),
            r: p.r,
            beta: p.beta,
            l1: p.pentagon.l1,
            t1: p.pentagon.t1,
            s: p.pentagon.s,
            l2: p.pentagon.l2,
            t2: p.pentagon.t2,
            closure_defect: p.closure_defect,
        }
    }
}

impl Record for RectRow {
    const HEADER: &'static [&'static str] = &[
        "rho1",
        "rho2",
        "sheet",
        "r",
        "beta",
        "l1",
        "t1",
        "s",
        "l2",
        "t2",
        "closure_defect",
    ];

    fn fields(&self) -> Vec<String> {
        let mut v = vec![fmt_f64(self.rho1), fmt_f64(self.rho2), self.sheet.clone()];
        v.extend(
            [
                self.r,
                self.beta,
                self.l1,
                self.t1,
                self.s,
                self.l2,
                self.t2,
                self.closure_defect,
            ]
            .map(fmt_f64),
        );
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoRow {
    pub alpha: f64,
    pub r: f64,
    pub branch: String,
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
}

impl From<&IsoModuliPoint> for IsoRow {
    fn from(p: &IsoModuliPoint) -> Self {
        Self {
            alpha: p.alpha,
            r: p.r,
            branch: p.branch.as_str().to_string(),
            b: p.b,
            beta: p.beta,
            l: p.l,
            t: p.t,
            s: p.s,
            rho_a: p.rho_a,
            rho_s: p.rho_s,
            f_residual: p.f_residual,
            closure_defect: p.closure_defect,
        }
    }
}

impl Record for IsoRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "r",
        "branch",
        "b",
        "beta",
        "l",
        "t",
        "s",
        "rhoA",
        "rhoS",
        "f_residual",
        "closure_defect",
    ];

    fn fields(&self) -> Vec<String> {
        let mut v = vec![fmt_f64(self.alpha), fmt_f64(self.r), self.branch.clone()];
        v.extend(
            [
                self.b,
                self.beta,
                self.l,
                self.t,
                self.s,
                self.rho_a,
                self.rho_s,
                self.f_residual,
                self.closure_defect,
            ]
            .map(fmt_f64),
        );
        v
    }
}

/// Header plus one line per record.
pub fn to_csv<R: Record>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(R::HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row.fields()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isosceles::{moduli_point, Branch, DiskPoint};
    use crate::rectangular::{self, Sheet};

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
    }

    #[test]
    fn rect_csv_layout() {
        let p = rectangular::moduli_point(0.3, 0.2, Sheet::Upper).unwrap();
        let csv = to_csv(&[RectRow::from(&p)]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "rho1,rho2,sheet,r,beta,l1,t1,s,l2,t2,closure_defect"
        );
        let row: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 11);
        assert_eq!(row[2], "upper");
        assert_eq!(row[3].parse::<f64>().unwrap(), p.r);
    }

    #[test]
    fn iso_csv_layout() {
        let p = moduli_point(&DiskPoint::new(1.0, 0.4, Branch::B2).unwrap()).unwrap();
        let csv = to_csv(&[IsoRow::from(&p)]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alpha,r,branch,b,beta,l,t,s,rhoA,rhoS,f_residual,closure_defect"
        );
        let row: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 12);
        assert_eq!(row[2], "b2");
        let json = serde_json::to_string(&IsoRow::from(&p)).unwrap();
        assert!(json.contains(r#""rhoA":"#));
    }
}
