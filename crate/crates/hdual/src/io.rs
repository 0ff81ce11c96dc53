//! File formats: H matrices and certificate reports as JSON,
//! trajectories as CSV, composite problem fixtures as JSON.

use crate::certify::{CertKind, Verdict};
use crate::composite::CompositeTrajectory;
use crate::continuous::OdeTrajectory;
use crate::linalg::{self, Mat};
use crate::method::{StepsizeMatrix, Trajectory};
use crate::testbed::{make_least_squares, CompositeProblem, Regularizer};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("bad file contents: {0}")]
    Schema(String),
}

#[derive(Serialize, Deserialize)]
struct HMatrixJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

pub fn save_h(path: &Path, h: &StepsizeMatrix) -> Result<(), IoError> {
    let doc = HMatrixJson { n: h.n, rows: h.rows.clone() };
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &doc)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn load_h(path: &Path) -> Result<StepsizeMatrix, IoError> {
    let doc: HMatrixJson = serde_json::from_reader(std::fs::File::open(path)?)?;
    if doc.rows.len() != doc.n {
        return Err(IoError::Schema(format!(
            "declared n = {} but found {} rows",
            doc.n,
            doc.rows.len()
        )));
    }
    for (k, r) in doc.rows.iter().enumerate() {
        if r.len() != k + 1 {
            return Err(IoError::Schema(format!(
                "row {k} has {} entries, expected {}",
                r.len(),
                k + 1
            )));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(IoError::Schema(format!("non-finite entry in row {k}")));
        }
    }
    Ok(StepsizeMatrix { n: doc.n, rows: doc.rows })
}

/// certificate verification report, one per (H, weights, kind)
#[derive(Serialize, Deserialize)]
pub struct CertificateReport {
    pub kind: String,
    pub n: usize,
    pub min_eig: f64,
    pub residual_congruence: f64,
    pub pass: bool,
    pub bound: BoundReport,
}

/// the rate the certificate buys, with the formula kept next to the
/// number so tables are regenerable
#[derive(Serialize, Deserialize)]
pub struct BoundReport {
    pub formula: String,
    pub coefficient: f64,
}

pub fn certificate_report(
    kind: CertKind,
    n: usize,
    verdict: &Verdict,
    residual_congruence: f64,
    bound: BoundReport,
) -> CertificateReport {
    CertificateReport {
        kind: match kind {
            CertKind::C1 => "C1".to_string(),
            CertKind::C2 => "C2".to_string(),
        },
        n,
        min_eig: verdict.min_eig,
        residual_congruence,
        pass: verdict.pass,
        bound,
    }
}

fn write_csv_rows(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), IoError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(f, "{}", line.join(","))?;
    }
    Ok(())
}

/// iter, f, grad_norm, then coordinates when asked for
pub fn write_trajectory_csv(
    path: &Path,
    traj: &Trajectory,
    coords: bool,
) -> Result<(), IoError> {
    let d = traj.points[0].len();
    let mut header = "iter,f,grad_norm".to_string();
    if coords {
        for j in 0..d {
            header.push_str(&format!(",x{j}"));
        }
    }
    write_csv_rows(
        path,
        &header,
        (0..traj.points.len()).map(|k| {
            let mut row = vec![k as f64, traj.fvals[k], linalg::norm(&traj.grads[k])];
            if coords {
                row.extend_from_slice(&traj.points[k]);
            }
            row
        }),
    )
}

/// composite run: the "grad_norm" column is the gradient mapping norm
/// L alpha ||y - y_plus||
pub fn write_composite_trajectory_csv(
    path: &Path,
    traj: &CompositeTrajectory,
    lip: f64,
    coords: bool,
) -> Result<(), IoError> {
    let d = traj.points[0].len();
    let mut header = "iter,f,grad_norm".to_string();
    if coords {
        for j in 0..d {
            header.push_str(&format!(",x{j}"));
        }
    }
    write_csv_rows(
        path,
        &header,
        (0..traj.points.len()).map(|k| {
            let gm = lip
                * traj.alpha
                * linalg::norm(&linalg::sub(&traj.points[k], &traj.prox_points[k]));
            let mut row = vec![k as f64, traj.fvals[k], gm];
            if coords {
                row.extend_from_slice(&traj.points[k]);
            }
            row
        }),
    )
}

/// t, f, grad_norm, then coordinates
pub fn write_ode_csv(path: &Path, traj: &OdeTrajectory, coords: bool) -> Result<(), IoError> {
    let d = traj.states[0].len();
    let mut header = "t,f,grad_norm".to_string();
    if coords {
        for j in 0..d {
            header.push_str(&format!(",x{j}"));
        }
    }
    write_csv_rows(
        path,
        &header,
        (0..traj.times.len()).map(|k| {
            let mut row = vec![traj.times[k], traj.fvals[k], linalg::norm(&traj.grads[k])];
            if coords {
                row.extend_from_slice(&traj.states[k]);
            }
            row
        }),
    )
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RegJson {
    None,
    L1 { lambda: f64 },
    Box { lo: f64, hi: f64 },
}

/// least-squares based composite fixture
#[derive(Serialize, Deserialize)]
pub struct FixtureJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub reg: RegJson,
    #[serde(rename = "Fstar")]
    pub fstar: Option<f64>,
}

pub fn save_fixture(path: &Path, fx: &FixtureJson) -> Result<(), IoError> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, fx)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// load a fixture; F* is computed with the reference solver when the
/// file does not carry it
pub fn load_fixture(path: &Path) -> Result<CompositeProblem, IoError> {
    let fx: FixtureJson = serde_json::from_reader(std::fs::File::open(path)?)?;
    let nrows = fx.a.len();
    if nrows == 0 || fx.a.iter().any(|r| r.len() != fx.a[0].len()) {
        return Err(IoError::Schema("A must be a nonempty rectangular matrix".into()));
    }
    if fx.b.len() != nrows {
        return Err(IoError::Schema(format!(
            "b has length {}, A has {} rows",
            fx.b.len(),
            nrows
        )));
    }
    let mut a = Mat::zeros(nrows, fx.a[0].len());
    for (i, r) in fx.a.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(IoError::Schema(format!("non-finite A[{i}][{j}]")));
            }
            a[(i, j)] = v;
        }
    }
    let reg = match fx.reg {
        RegJson::None => Regularizer::Zero,
        RegJson::L1 { lambda } => {
            if lambda < 0.0 {
                return Err(IoError::Schema("lambda must be nonnegative".into()));
            }
            Regularizer::L1 { lambda }
        }
        RegJson::Box { lo, hi } => {
            if lo > hi {
                return Err(IoError::Schema("box bounds out of order".into()));
            }
            Regularizer::Box { lo, hi }
        }
    };
    let smooth = make_least_squares(a, fx.b);
    let mut prob = CompositeProblem { smooth: Box::new(smooth), reg, fstar: fx.fstar };
    if prob.fstar.is_none() {
        prob.fstar = Some(crate::composite::reference_fstar(&prob));
    }
    Ok(prob)
}
