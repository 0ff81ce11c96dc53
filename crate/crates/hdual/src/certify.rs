//! Lyapunov certificates: bracket evaluators, the discrete energy
//! sequences U_k and V_k, the quadratic-form coefficient matrices
//! S(H,u) and T(HA,v), the congruence transform M(u) relating them,
//! and PSD verdicts for the two convergence conditions.
//!
//! Condition C1 asks u_N (f(x_N) - f*) <= U_N for arbitrary gradient
//! vectors; C2 asks (1/2L)||grad f(y_N)||^2 <= V_N. Each is a PSD test
//! on the matching certificate matrix, and S(H,u) = M(u)' T(HA,v) M(u)
//! with v_i = 1/u_{N-i} makes the two tests equivalent.

use crate::linalg::{self, Mat};
use crate::method::{anti_transpose, StepsizeMatrix, Trajectory};
use crate::testbed::ConvexOracle;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("refusing to emit a bound: the {0} verdict failed")]
    VerdictFailed(&'static str),
    #[error("stepsize h = {0} out of range (need 0 < h <= 1)")]
    StepOutOfRange(f64),
}

/// positive nondecreasing certificate multipliers; u_{-1} = 0 is
/// implicit and never stored
#[derive(Clone, Debug)]
pub struct WeightSequence {
    pub values: Vec<f64>,
}

impl WeightSequence {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty());
        assert!(values.iter().all(|&x| x > 0.0 && x.is_finite()));
        WeightSequence { values }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// the paired dual weights v_i = 1/u_{N-i}
    pub fn reciprocal_reversed(&self) -> WeightSequence {
        WeightSequence::new(self.values.iter().rev().map(|&u| 1.0 / u).collect())
    }

    /// u_i with the u_{-1} = 0 convention (i is an offset from 0;
    /// callers pass i as isize to reach -1 and -2)
    fn at(&self, i: isize) -> f64 {
        if i < 0 {
            0.0
        } else {
            self.values[i as usize]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    /// function-value side, matrix S(H,u)
    C1,
    /// gradient-norm side, matrix T(HA,v)
    C2,
}

/// symmetric coefficient matrix of the quadratic form: the energy
/// slack equals sum_{i,j} entries[i][j] <grad_i, grad_j> / L
#[derive(Clone, Debug)]
pub struct CertificateMatrix {
    pub n: usize,
    pub kind: CertKind,
    pub mat: Mat,
}

/// arbitrary vectors standing in for the gradients; the conditions
/// quantify over these, not over gradients of an actual function
#[derive(Clone, Debug)]
pub struct GradientBundle {
    pub g: Vec<Vec<f64>>,
}

/// convexity bracket [x,y] = f(y) - f(x) + <grad f(y), x - y>, <= 0
pub fn bracket_convexity(f: &dyn ConvexOracle, x: &[f64], y: &[f64]) -> f64 {
    let gy = f.grad(y);
    f.value(y) - f.value(x) + linalg::dot(&gy, &linalg::sub(x, y))
}

/// cocoercivity bracket: convexity bracket plus the gradient-difference
/// quadratic, still <= 0 for L-smooth convex f
pub fn bracket_coco(f: &dyn ConvexOracle, x: &[f64], y: &[f64], lip: f64) -> f64 {
    let gx = f.grad(x);
    let gy = f.grad(y);
    bracket_from_values(
        f.value(x),
        f.value(y),
        &gx,
        &gy,
        x,
        y,
        lip,
    )
}

/// bracket against the minimizer: f* - f(x) + (1/2L)||grad f(x)||^2
pub fn bracket_coco_star(f: &dyn ConvexOracle, x: &[f64], lip: f64, fstar: f64) -> f64 {
    let gx = f.grad(x);
    fstar - f.value(x) + linalg::norm_sq(&gx) / (2.0 * lip)
}

// same bracket from stored values, so energies see exactly the
// gradients the run used
fn bracket_from_values(
    fx: f64,
    fy: f64,
    gx: &[f64],
    gy: &[f64],
    x: &[f64],
    y: &[f64],
    lip: f64,
) -> f64 {
    fy - fx
        + linalg::dot(gy, &linalg::sub(x, y))
        + linalg::norm_sq(&linalg::sub(gx, gy)) / (2.0 * lip)
}

/// energy sequence U_{-1} .. U_N along a trajectory; returned vector
/// has length N+2 with index k+1 holding U_k
pub fn energy_u(traj: &Trajectory, u: &WeightSequence, xstar: &[f64], fstar: f64) -> Vec<f64> {
    let n = traj.n();
    assert_eq!(u.n(), n);
    let lip = traj.lipschitz;
    let r0 = linalg::sub(&traj.points[0], xstar);
    let u_minus1 = 0.5 * lip * linalg::norm_sq(&r0);
    let mut out = Vec::with_capacity(n + 2);
    out.push(u_minus1);
    let mut acc = u_minus1;
    // star bracket at x_k: [[x*, x_k]] with grad f(x*) = 0
    let star_bracket = |k: usize| -> f64 {
        bracket_from_values(
            fstar,
            traj.fvals[k],
            &vec![0.0; xstar.len()],
            &traj.grads[k],
            xstar,
            &traj.points[k],
            lip,
        )
    };
    for k in 0..=n {
        // moving from U_{k-1} to U_k adds one step bracket (weighted
        // u_{k-1}) and one star bracket (weighted u_k - u_{k-1})
        if k > 0 {
            let step = bracket_from_values(
                traj.fvals[k - 1],
                traj.fvals[k],
                &traj.grads[k - 1],
                &traj.grads[k],
                &traj.points[k - 1],
                &traj.points[k],
                lip,
            );
            acc += u.values[k - 1] * step;
        }
        let du = u.values[k] - if k == 0 { 0.0 } else { u.values[k - 1] };
        acc += du * star_bracket(k);
        out.push(acc);
    }
    out
}

/// energy sequence V_0 .. V_N along a trajectory (the y-side run)
pub fn energy_v(traj: &Trajectory, v: &WeightSequence, fstar: f64) -> Vec<f64> {
    let n = traj.n();
    assert_eq!(v.n(), n);
    let lip = traj.lipschitz;
    let yn = &traj.points[n];
    let gn = &traj.grads[n];
    let fyn = traj.fvals[n];
    // [[y_N, *]] needs only f*, not the minimizer itself
    let star = fstar - fyn + linalg::norm_sq(gn) / (2.0 * lip);
    let v0 = v.values[0] * (traj.fvals[0] - fstar + star);
    let mut out = Vec::with_capacity(n + 1);
    out.push(v0);
    let mut acc = v0;
    for k in 0..n {
        let step = bracket_from_values(
            traj.fvals[k],
            traj.fvals[k + 1],
            &traj.grads[k],
            &traj.grads[k + 1],
            &traj.points[k],
            &traj.points[k + 1],
            lip,
        );
        // [[y_N, y_k]]
        let tail = bracket_from_values(
            fyn,
            traj.fvals[k],
            gn,
            &traj.grads[k],
            yn,
            &traj.points[k],
            lip,
        );
        acc += v.values[k + 1] * step + (v.values[k + 1] - v.values[k]) * tail;
        out.push(acc);
    }
    out
}

// (N+1)x(N+1) embedding of H with a leading zero row, so column sums
// against unit vectors reproduce the iterate differences
fn embed(h: &StepsizeMatrix) -> Mat {
    let n = h.n;
    let mut m = Mat::zeros(n + 1, n + 1);
    for k in 0..n {
        for i in 0..=k {
            m[(k + 1, i)] = h.rows[k][i];
        }
    }
    m
}

/// S(H,u) from the closed-form entry formulas
pub fn build_s(h: &StepsizeMatrix, u: &WeightSequence) -> CertificateMatrix {
    let n = h.n;
    assert_eq!(u.n(), n);
    let ni = n as isize;
    let mut mat = Mat::zeros(n + 1, n + 1);
    let s_entry = |i: isize, j: isize| -> f64 {
        if j == i {
            let d = u.at(i) - u.at(i - 1);
            if i == ni {
                -0.5 * d * d + 0.5 * u.at(i)
            } else {
                -0.5 * d * d + u.at(i)
            }
        } else if j == i - 1 {
            u.at(i) * h.rows[(i - 1) as usize][(i - 1) as usize] - u.at(i - 1)
                - (u.at(i) - u.at(i - 1)) * (u.at(i - 1) - u.at(i - 2))
        } else {
            // j <= i - 2
            let colsum: f64 = ((j as usize)..(i as usize))
                .map(|l| h.rows[l][j as usize])
                .sum();
            (u.at(i) - u.at(i - 1)) * colsum + u.at(i - 1) * h.rows[(i - 1) as usize][j as usize]
                - (u.at(i) - u.at(i - 1)) * (u.at(j) - u.at(j - 1))
        }
    };
    for i in 0..=ni {
        for j in 0..=i {
            let s = s_entry(i, j);
            if i == j {
                mat[(i as usize, j as usize)] = s;
            } else {
                // the paper sums over i <= j once; halve so the full
                // symmetric quadratic form reproduces that sum
                mat[(i as usize, j as usize)] = 0.5 * s;
                mat[(j as usize, i as usize)] = 0.5 * s;
            }
        }
    }
    CertificateMatrix { n, kind: CertKind::C1, mat }
}

/// S(H,u) assembled from unit vectors and the embedded H; independent
/// construction route used to cross-check `build_s`
pub fn build_s_assembly(h: &StepsizeMatrix, u: &WeightSequence) -> CertificateMatrix {
    let n = h.n;
    assert_eq!(u.n(), n);
    let dim = n + 1;
    let hh = embed(h);
    // accumulate 2L * S, then halve (the 1/L is our scale convention)
    let mut acc = Mat::zeros(dim, dim);
    let d: Vec<f64> = (0..dim)
        .map(|i| u.values[i] - if i == 0 { 0.0 } else { u.values[i - 1] })
        .collect();
    acc.add_outer(-1.0, &d, &d);
    // P = sum_i u_i (e_0 + .. + e_i)(e_i - e_{i+1})'
    let mut p = Mat::zeros(dim, dim);
    for i in 0..dim {
        for r in 0..=i {
            p[(r, i)] += u.values[i];
            if i + 1 < dim {
                p[(r, i + 1)] -= u.values[i];
            }
        }
    }
    acc = acc.add(&hh.transpose().matmul(&p));
    acc = acc.add(&p.transpose().matmul(&hh));
    // sum_i u_i ((e_i - e_{i+1}) e_i' + e_i (e_i - e_{i+1})') - u_N e_N e_N'
    for i in 0..dim {
        acc[(i, i)] += 2.0 * u.values[i];
        if i + 1 < dim {
            acc[(i + 1, i)] -= u.values[i];
            acc[(i, i + 1)] -= u.values[i];
        }
    }
    acc[(n, n)] -= u.values[n];
    CertificateMatrix { n, kind: CertKind::C1, mat: acc.scale(0.5) }
}

/// T(HA,v) from the closed-form entry formulas; the stepsize argument
/// is the dual matrix HA (the method actually being run)
pub fn build_t(ha: &StepsizeMatrix, v: &WeightSequence) -> CertificateMatrix {
    let n = ha.n;
    assert_eq!(v.n(), n);
    let vv = &v.values;
    // sum_{l=i0}^{N-1} h_{l+1,j}
    let colsum = |j: usize, i0: usize| -> f64 { (i0..n).map(|l| ha.rows[l][j]).sum() };
    let mut mat = Mat::zeros(n + 1, n + 1);
    let t_entry = |i: usize, j: usize| -> f64 {
        if i == j {
            if i == 0 && n >= 1 {
                0.5 * vv[1] + 0.5 * (vv[1] - vv[0]) - (vv[1] - vv[0]) * colsum(0, 0)
            } else if i < n {
                0.5 * (vv[i + 1] + vv[i]) + 0.5 * (vv[i + 1] - vv[i])
                    - (vv[i + 1] - vv[i]) * colsum(i, i)
            } else {
                0.5 * (vv[0] - 1.0) + 0.5 * vv[n] + 0.5 * (vv[n] - vv[0])
            }
        } else if j == i - 1 {
            if i < n {
                vv[i] * ha.rows[i - 1][i - 1] - vv[i]
                    - (vv[i + 1] - vv[i]) * colsum(i - 1, i)
                    - (vv[i] - vv[i - 1]) * colsum(i, i)
            } else {
                vv[n] * ha.rows[n - 1][n - 1] - vv[n] - (vv[n] - vv[n - 1])
            }
        } else {
            // j <= i - 2
            if i < n {
                vv[i] * ha.rows[i - 1][j]
                    - (vv[i + 1] - vv[i]) * colsum(j, i)
                    - (vv[j + 1] - vv[j]) * colsum(i, i)
            } else {
                vv[n] * ha.rows[n - 1][j] - (vv[j + 1] - vv[j])
            }
        }
    };
    for i in 0..=n {
        for j in 0..=i {
            let t = t_entry(i, j);
            if i == j {
                mat[(i, j)] = t;
            } else {
                mat[(i, j)] = 0.5 * t;
                mat[(j, i)] = 0.5 * t;
            }
        }
    }
    CertificateMatrix { n, kind: CertKind::C2, mat }
}

/// T(HA,v) assembled from unit vectors; cross-check route
pub fn build_t_assembly(ha: &StepsizeMatrix, v: &WeightSequence) -> CertificateMatrix {
    let n = ha.n;
    assert_eq!(v.n(), n);
    let dim = n + 1;
    let hh = embed(ha);
    let mut acc = Mat::zeros(dim, dim);
    let unit = |i: isize| -> Vec<f64> {
        let mut e = vec![0.0; dim];
        if i >= 0 && (i as usize) < dim {
            e[i as usize] = 1.0;
        }
        e
    };
    for i in 0..dim {
        let a = linalg::sub(&unit(i as isize - 1), &unit(i as isize));
        let b = linalg::sub(&unit(i as isize - 1), &unit(n as isize));
        acc.add_outer(v.values[i], &a, &b);
        acc.add_outer(v.values[i], &b, &a);
    }
    acc[(0, 0)] -= v.values[0];
    acc[(n, n)] -= 1.0;
    // R = sum_i v_i (e_i + .. + e_N)(e_i - e_{i-1})'
    let mut r = Mat::zeros(dim, dim);
    for i in 0..dim {
        for row in i..dim {
            r[(row, i)] += v.values[i];
            if i >= 1 {
                r[(row, i - 1)] -= v.values[i];
            }
        }
    }
    acc = acc.add(&hh.transpose().matmul(&r));
    acc = acc.add(&r.transpose().matmul(&hh));
    CertificateMatrix { n, kind: CertKind::C2, mat: acc.scale(0.5) }
}

/// anti-triangular basis-change matrix M(u): row 0 is (0,..,0,u_N) and
/// row r carries u_{N-r} followed by the successive differences
#[derive(Clone, Debug)]
pub struct DualityTransform {
    pub n: usize,
    pub mat: Mat,
}

pub fn build_m(u: &WeightSequence) -> DualityTransform {
    let n = u.n();
    let mut mat = Mat::zeros(n + 1, n + 1);
    for i in 0..=n {
        mat[(i, n - i)] = u.values[n - i];
        for j in (n - i + 1)..=n {
            mat[(i, j)] = u.values[j] - u.values[j - 1];
        }
    }
    DualityTransform { n, mat }
}

#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub n: usize,
    pub residual: f64,
    pub s_max: f64,
    pub pass: bool,
}

/// numerical check of S(H,u) = M(u)' T(HA,v) M(u) with v_i = 1/u_{N-i}
pub fn verify_congruence(h: &StepsizeMatrix, u: &WeightSequence) -> CongruenceReport {
    let s = build_s(h, u);
    let ha = anti_transpose(h);
    let v = u.reciprocal_reversed();
    let t = build_t(&ha, &v);
    let m = build_m(u);
    let rhs = m.mat.transpose().matmul(&t.mat).matmul(&m.mat);
    let residual = s.mat.sub(&rhs).max_abs();
    let s_max = s.mat.max_abs();
    CongruenceReport { n: h.n, residual, s_max, pass: residual <= 1e-9 * s_max.max(1.0) }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub kind: CertKind,
    pub min_eig: f64,
    pub spectral_radius: f64,
    pub pass: bool,
}

const PSD_TOL: f64 = 1e-9;

fn psd_verdict(c: &CertificateMatrix) -> Verdict {
    let eigs = linalg::sym_eigenvalues(&c.mat);
    let min_eig = *eigs.first().unwrap();
    let spectral_radius = eigs.iter().fold(0.0_f64, |m, &e| m.max(e.abs()));
    Verdict {
        kind: c.kind,
        min_eig,
        spectral_radius,
        pass: min_eig >= -PSD_TOL * spectral_radius.max(1.0),
    }
}

/// does the function-value condition hold for (H, u)?
pub fn check_c1(h: &StepsizeMatrix, u: &WeightSequence) -> Verdict {
    psd_verdict(&build_s(h, u))
}

/// does the gradient-norm condition hold for (HA, v)?
pub fn check_c2(ha: &StepsizeMatrix, v: &WeightSequence) -> Verdict {
    psd_verdict(&build_t(ha, v))
}

/// the guarantee a passing certificate buys
#[derive(Clone, Debug)]
pub struct RateBound {
    pub kind: CertKind,
    /// C1: f(x_N) - f* <= coefficient * L * ||x_0 - x*||^2
    /// C2: (1/2L)||grad f(y_N)||^2 <= coefficient * (f(y_0) - f*)
    pub coefficient: f64,
    pub description: String,
}

pub fn rate_from_certificate(
    verdict: &Verdict,
    weights: &WeightSequence,
) -> Result<RateBound, CertifyError> {
    if !verdict.pass {
        return Err(CertifyError::VerdictFailed(match verdict.kind {
            CertKind::C1 => "C1",
            CertKind::C2 => "C2",
        }));
    }
    Ok(match verdict.kind {
        CertKind::C1 => {
            let un = *weights.values.last().unwrap();
            RateBound {
                kind: CertKind::C1,
                coefficient: 1.0 / (2.0 * un),
                description: format!("f(x_N) - f* <= (1/(2 u_N)) L R^2 with u_N = {un}"),
            }
        }
        CertKind::C2 => {
            let v0 = weights.values[0];
            RateBound {
                kind: CertKind::C2,
                coefficient: v0,
                description: format!(
                    "(1/2L)||grad f(y_N)||^2 <= v_0 (f(y_0) - f*) with v_0 = {v0}"
                ),
            }
        }
    })
}

/// the two branches of the gradient-descent gradient-norm guarantee:
/// (1/2L)||grad f(x_N)||^2 <= min(fgap_coeff * (f(x_0) - f*),
/// dist_coeff * L * ||x_0 - x*||^2)
#[derive(Clone, Debug)]
pub struct GdCorollaryBound {
    pub fgap_coeff: f64,
    pub dist_coeff: f64,
}

pub fn gd_gradient_corollary_bound(n: usize, h: f64) -> Result<GdCorollaryBound, CertifyError> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(CertifyError::StepOutOfRange(h));
    }
    let nf = n as f64;
    let lo = (n / 2) as f64;
    let hi = n.div_ceil(2) as f64;
    Ok(GdCorollaryBound {
        fgap_coeff: 1.0 / (2.0 * nf * h + 1.0),
        dist_coeff: 1.0 / (2.0 * (2.0 * lo * h + 1.0) * (2.0 * hi * h + 1.0)),
    })
}

/// raw energy slack U evaluated from its definition on arbitrary
/// gradient vectors, synthesizing the iterate differences from H;
/// independent of the matrix assembly, used as the trace oracle
pub fn raw_u_from_bundle(
    h: &StepsizeMatrix,
    u: &WeightSequence,
    bundle: &GradientBundle,
    lip: f64,
) -> f64 {
    let n = h.n;
    assert_eq!(bundle.g.len(), n + 1);
    let d = bundle.g[0].len();
    // steps[i] = x_i - x_{i+1}
    let steps: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut s = vec![0.0; d];
            for i in 0..=k {
                for (sj, gj) in s.iter_mut().zip(&bundle.g[i]) {
                    *sj += h.rows[k][i] / lip * gj;
                }
            }
            s
        })
        .collect();
    let mut acc = 0.0;
    let mut weighted_sum = vec![0.0; d];
    let mut x0_minus_xi = vec![0.0; d];
    for i in 0..=n {
        let du = u.values[i] - if i == 0 { 0.0 } else { u.values[i - 1] };
        for (w, g) in weighted_sum.iter_mut().zip(&bundle.g[i]) {
            *w += du * g;
        }
        acc += du
            * (linalg::dot(&bundle.g[i], &x0_minus_xi)
                + linalg::norm_sq(&bundle.g[i]) / (2.0 * lip));
        if i < n {
            acc += u.values[i]
                * (linalg::dot(&bundle.g[i + 1], &steps[i])
                    + linalg::norm_sq(&linalg::sub(&bundle.g[i], &bundle.g[i + 1]))
                        / (2.0 * lip));
            for (x, s) in x0_minus_xi.iter_mut().zip(&steps[i]) {
                *x += s;
            }
        }
    }
    acc - linalg::norm_sq(&weighted_sum) / (2.0 * lip)
}

/// raw energy slack V on arbitrary gradient vectors, dual side
pub fn raw_v_from_bundle(
    ha: &StepsizeMatrix,
    v: &WeightSequence,
    bundle: &GradientBundle,
    lip: f64,
) -> f64 {
    let n = ha.n;
    assert_eq!(bundle.g.len(), n + 1);
    let d = bundle.g[0].len();
    let steps: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut s = vec![0.0; d];
            for i in 0..=k {
                for (sj, gj) in s.iter_mut().zip(&bundle.g[i]) {
                    *sj += ha.rows[k][i] / lip * gj;
                }
            }
            s
        })
        .collect();
    let gn = &bundle.g[n];
    let mut acc = (v.values[0] - 1.0) / (2.0 * lip) * linalg::norm_sq(gn);
    // yn_minus_yi starts at y_N - y_N = 0 and grows backwards
    let mut yn_minus_yi = vec![vec![0.0; d]; n + 1];
    for i in (0..n).rev() {
        yn_minus_yi[i] = linalg::sub(&yn_minus_yi[i + 1], &steps[i]);
    }
    for i in 0..n {
        acc += v.values[i + 1]
            * (linalg::dot(&bundle.g[i + 1], &steps[i])
                + linalg::norm_sq(&linalg::sub(&bundle.g[i], &bundle.g[i + 1])) / (2.0 * lip));
        acc += (v.values[i + 1] - v.values[i])
            * (linalg::dot(&bundle.g[i], &yn_minus_yi[i])
                + linalg::norm_sq(&linalg::sub(&bundle.g[i], gn)) / (2.0 * lip));
    }
    acc
}

/// quadratic form of a certificate matrix over a gradient bundle
pub fn quadratic_form(c: &CertificateMatrix, bundle: &GradientBundle, lip: f64) -> f64 {
    let n = c.n;
    assert_eq!(bundle.g.len(), n + 1);
    let mut acc = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let coef = c.mat[(i, j)];
            if coef != 0.0 {
                acc += coef * linalg::dot(&bundle.g[i], &bundle.g[j]);
            }
        }
    }
    acc / lip
}

/// the weight pairs the catalog methods come with

pub fn ogm_u(n: usize) -> WeightSequence {
    let th = crate::method::theta_sequence(n).values;
    let mut u: Vec<f64> = th[..n].iter().map(|&x| 2.0 * x * x).collect();
    u.push(th[n] * th[n]);
    WeightSequence::new(u)
}

pub fn ogmg_v(n: usize) -> WeightSequence {
    ogm_u(n).reciprocal_reversed()
}

pub fn obl_u(n: usize) -> WeightSequence {
    let mut u: Vec<f64> = (0..n).map(|i| ((i + 1) * (i + 2)) as f64 / 2.0).collect();
    let g = ((n * (n + 1)) as f64 / 2.0).sqrt();
    u.push(g * g + g);
    WeightSequence::new(u)
}

pub fn obl_v(n: usize) -> WeightSequence {
    obl_u(n).reciprocal_reversed()
}

pub fn gd_u(n: usize, h: f64) -> WeightSequence {
    let nf = n as f64;
    let un = 2.0 * nf * h + 1.0;
    let mut u: Vec<f64> = (0..n)
        .map(|i| un * (i as f64 + 1.0) / (2.0 * nf - i as f64))
        .collect();
    u.push(un);
    WeightSequence::new(u)
}

pub fn gd_v(n: usize, h: f64) -> WeightSequence {
    gd_u(n, h).reciprocal_reversed()
}

pub fn gogm_u(ts: &crate::method::TSequence) -> WeightSequence {
    WeightSequence::new(ts.sums.clone())
}

pub fn gogm_dual_v(ts: &crate::method::TSequence) -> WeightSequence {
    gogm_u(ts).reciprocal_reversed()
}
