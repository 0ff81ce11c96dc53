//! Stepsize matrices, coefficient sequences, the method catalog, the
//! anti-transpose (H-dual) map, and the discrete runners.
//!
//! An N-step fixed-step first-order method is identified with a lower
//! triangular matrix H: x_{k+1} = x_k - (1/L) sum_{i<=k} h_{k+1,i} grad f(x_i).
//! Reflecting H across the anti-diagonal swaps function-value methods
//! with gradient-norm methods; that map is `anti_transpose`.

use crate::linalg::{self, Mat};
use crate::testbed::ConvexOracle;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MethodError {
    #[error("iterate {index} has a non-finite coordinate; method diverged")]
    Divergence { index: usize },
    #[error("dual coefficient denominator vanishes at k={index}")]
    DivisionGuard { index: usize },
    #[error("sequence infeasible at index {index}: {what}")]
    Infeasible { index: usize, what: String },
    #[error("non-finite stepsize entry at row {row}, col {col}")]
    BadEntry { row: usize, col: usize },
}

/// lower-triangular stepsize matrix; rows[k][i] holds h_{k+1,i} for
/// 0 <= i <= k <= n-1, so row k has k+1 entries
#[derive(Clone, Debug, PartialEq)]
pub struct StepsizeMatrix {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl StepsizeMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, MethodError> {
        let n = rows.len();
        assert!(n >= 1, "empty stepsize matrix");
        for (k, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), k + 1, "row {k} must have {} entries", k + 1);
            for (i, &x) in r.iter().enumerate() {
                if !x.is_finite() {
                    return Err(MethodError::BadEntry { row: k, col: i });
                }
            }
        }
        Ok(StepsizeMatrix { n, rows })
    }

    /// h_{k+1,i}; zero above the diagonal
    pub fn h(&self, k: usize, i: usize) -> f64 {
        if i <= k {
            self.rows[k][i]
        } else {
            0.0
        }
    }

    /// dense n x n lower-triangular form
    pub fn dense(&self) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for k in 0..self.n {
            for i in 0..=k {
                m[(k, i)] = self.rows[k][i];
            }
        }
        m
    }

    /// max relative entrywise difference against another matrix
    pub fn max_rel_diff(&self, other: &StepsizeMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        let mut worst = 0.0_f64;
        for k in 0..self.n {
            for i in 0..=k {
                let a = self.rows[k][i];
                let b = other.rows[k][i];
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
            }
        }
        worst
    }
}

/// reflect across the anti-diagonal: HA_{i,j} = H_{N-j+1,N-i+1}
/// (1-based); an involution that implements H-duality
pub fn anti_transpose(h: &StepsizeMatrix) -> StepsizeMatrix {
    let n = h.n;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..=k).map(|i| h.rows[n - 1 - i][n - 1 - k]).collect())
        .collect();
    StepsizeMatrix { n, rows }
}

/// theta_0 .. theta_N with the standard accelerated-method recursion
/// and the doubled terminal step
#[derive(Clone, Debug)]
pub struct ThetaSequence {
    pub values: Vec<f64>,
}

pub fn theta_sequence(n: usize) -> ThetaSequence {
    assert!(n >= 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    values.push(1.0);
    for i in 0..n.saturating_sub(1) {
        let prev = values[i];
        // positive root of theta^2 - theta = prev^2
        values.push(0.5 * (1.0 + (1.0 + 4.0 * prev * prev).sqrt()));
    }
    let prev = values[n - 1];
    // terminal rule theta^2 - theta = 2 prev^2, larger root
    values.push(0.5 * (1.0 + (1.0 + 8.0 * prev * prev).sqrt()));
    ThetaSequence { values }
}

impl ThetaSequence {
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// worst relative residual of the defining recursions
    pub fn recursion_residual(&self) -> f64 {
        let th = &self.values;
        let n = self.n();
        let mut worst = (th[0] - 1.0).abs();
        for i in 0..n.saturating_sub(1) {
            let lhs = th[i + 1] * th[i + 1] - th[i + 1];
            let rhs = th[i] * th[i];
            worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
        }
        let lhs = th[n] * th[n] - th[n];
        let rhs = 2.0 * th[n - 1] * th[n - 1];
        worst.max((lhs - rhs).abs() / rhs.max(1.0))
    }
}

/// positive steps t_i with running sums T_i
#[derive(Clone, Debug)]
pub struct TSequence {
    pub t: Vec<f64>,
    pub sums: Vec<f64>,
}

impl TSequence {
    pub fn from_steps(t: Vec<f64>) -> Self {
        assert!(!t.is_empty());
        assert!(t.iter().all(|&x| x > 0.0), "steps must be positive");
        let mut sums = Vec::with_capacity(t.len());
        let mut acc = 0.0;
        for &x in &t {
            acc += x;
            sums.push(acc);
        }
        TSequence { t, sums }
    }

    pub fn n(&self) -> usize {
        self.t.len() - 1
    }

    /// accelerated-family feasibility: t_i^2 <= 2 T_i for i < N and
    /// t_N^2 <= T_N; returns the first violating index
    pub fn check_family_feasible(&self) -> Result<(), MethodError> {
        let n = self.n();
        for i in 0..n {
            if self.t[i] * self.t[i] > 2.0 * self.sums[i] + 1e-12 {
                return Err(MethodError::Infeasible {
                    index: i,
                    what: format!("t_i^2 = {} > 2 T_i = {}", self.t[i] * self.t[i], 2.0 * self.sums[i]),
                });
            }
        }
        if self.t[n] * self.t[n] > self.sums[n] + 1e-12 {
            return Err(MethodError::Infeasible {
                index: n,
                what: format!("t_N^2 = {} > T_N = {}", self.t[n] * self.t[n], self.sums[n]),
            });
        }
        Ok(())
    }

    /// proximal-family feasibility: T_i <= t_i^2 for all i
    pub fn check_prox_feasible(&self) -> Result<(), MethodError> {
        for i in 0..self.t.len() {
            if self.sums[i] > self.t[i] * self.t[i] + 1e-12 {
                return Err(MethodError::Infeasible {
                    index: i,
                    what: format!("T_i = {} > t_i^2 = {}", self.sums[i], self.t[i] * self.t[i]),
                });
            }
        }
        Ok(())
    }

    /// T_i = t_i^2 (the fastest feasible growth on both sides)
    pub fn quadratic(n: usize) -> Self {
        let mut t = Vec::with_capacity(n + 1);
        let mut big = 0.0_f64;
        for _ in 0..=n {
            // positive root of t^2 - t = T_{i-1}
            let ti = 0.5 * (1.0 + (1.0 + 4.0 * big).sqrt());
            t.push(ti);
            big += ti;
        }
        TSequence::from_steps(t)
    }

    /// t_i^2 = 2 T_i for i < N and t_N^2 = T_N; matches the theta
    /// sequence via t_i = 2 theta_i, t_N = theta_N
    pub fn ogm_like(n: usize) -> Self {
        let th = theta_sequence(n);
        let mut t: Vec<f64> = th.values[..n].iter().map(|&x| 2.0 * x).collect();
        t.push(th.values[n]);
        TSequence::from_steps(t)
    }

    /// t_i = i+1 for i < N, t_N = sqrt(N(N+1)/2)
    pub fn obl_like(n: usize) -> Self {
        let mut t: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
        t.push(((n * (n + 1)) as f64 / 2.0).sqrt());
        TSequence::from_steps(t)
    }

    /// T_i = (i+2)(i+3)/4, the sequence behind the composite
    /// gradient-norm method at prox scale 4
    pub fn sfg(n: usize) -> Self {
        let mut t = Vec::with_capacity(n + 1);
        t.push(1.5);
        for i in 1..=n {
            t.push((i + 2) as f64 / 2.0);
        }
        TSequence::from_steps(t)
    }
}

/// momentum coefficients for the three-term recursion
/// x_{k+1} = x_k^+ + beta_k (x_k^+ - x_{k-1}^+) + gamma_k (x_k^+ - x_k)
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeTermCoeffs {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl ThreeTermCoeffs {
    pub fn new(beta: Vec<f64>, gamma: Vec<f64>) -> Self {
        assert_eq!(beta.len(), gamma.len());
        assert!(!beta.is_empty());
        assert!(beta.iter().chain(&gamma).all(|x| x.is_finite()));
        ThreeTermCoeffs { beta, gamma }
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }
}

/// unroll the three-term recursion into its H matrix:
/// h_{k+1,i} = (prod_{j=i+1..k} beta_j)(beta_i + gamma_i + [k==i])
pub fn three_term_to_h(c: &ThreeTermCoeffs) -> StepsizeMatrix {
    let n = c.n();
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        row[k] = 1.0 + c.beta[k] + c.gamma[k];
        let mut prod = 1.0;
        for i in (0..k).rev() {
            prod *= c.beta[i + 1];
            row[i] = prod * (c.beta[i] + c.gamma[i]);
        }
        rows.push(row);
    }
    StepsizeMatrix { n, rows }
}

/// H-dual of a three-term recursion, again in three-term form.
/// Uses the auxiliary pair (beta_N, gamma_N) = (1, 0); the dual method
/// does not depend on that choice. A vanishing beta_{N-k}+gamma_{N-k}
/// is only allowed in the trivially self-dual all-zero case.
pub fn dual_three_term(c: &ThreeTermCoeffs) -> Result<ThreeTermCoeffs, MethodError> {
    let n = c.n();
    let ext = |i: usize| -> (f64, f64) {
        if i == n {
            (1.0, 0.0)
        } else {
            (c.beta[i], c.gamma[i])
        }
    };
    let mut beta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let (b_hi, g_hi) = ext(n - k);
        let (b_lo, g_lo) = ext(n - 1 - k);
        let denom = b_hi + g_hi;
        if denom == 0.0 {
            if b_hi == 0.0 && g_hi == 0.0 && b_lo == 0.0 && g_lo == 0.0 {
                // pure gradient steps are self-dual
                beta.push(0.0);
                gamma.push(0.0);
                continue;
            }
            return Err(MethodError::DivisionGuard { index: k });
        }
        beta.push(b_hi * (b_lo + g_lo) / denom);
        gamma.push(g_hi * (b_lo + g_lo) / denom);
    }
    Ok(ThreeTermCoeffs::new(beta, gamma))
}

/// function-value optimal method (diagonal 1 + (2 theta_k - 1)/theta_{k+1})
pub fn ogm_h(n: usize) -> StepsizeMatrix {
    let th = theta_sequence(n).values;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        row[k] = 1.0 + (2.0 * th[k] - 1.0) / th[k + 1];
        if k > 0 {
            let f = (th[k] - 1.0) / th[k + 1];
            row[k - 1] = f * (rows[k - 1][k - 1] - 1.0);
            for i in 0..k.saturating_sub(1) {
                row[i] = f * rows[k - 1][i];
            }
        }
        rows.push(row);
    }
    StepsizeMatrix { n, rows }
}

/// gradient-norm optimal method; its own recursion runs along columns
/// with reversed theta indices, and the result is the anti-transpose
/// of `ogm_h`
pub fn ogmg_h(n: usize) -> StepsizeMatrix {
    let th = theta_sequence(n).values;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        row[k] = 1.0 + (2.0 * th[n - k - 1] - 1.0) / th[n - k];
        if k > 0 {
            row[k - 1] = (th[n - k] - 1.0) / th[n - k + 1] * (row[k] - 1.0);
            for i in (0..k.saturating_sub(1)).rev() {
                row[i] = (th[n - i - 1] - 1.0) / th[n - i] * row[i + 1];
            }
        }
        rows.push(row);
    }
    StepsizeMatrix { n, rows }
}

fn obl_gamma(n: usize) -> f64 {
    ((n * (n + 1)) as f64 / 2.0).sqrt()
}

/// function-value method with the simple polynomial coefficients
/// (the terminal row carries the sqrt(N(N+1)/2) correction)
pub fn obl_f_h(n: usize) -> StepsizeMatrix {
    let g = obl_gamma(n);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        if k + 1 < n {
            let kf = k as f64;
            row[k] = 1.0 + 2.0 * kf / (kf + 3.0);
            if k > 0 {
                let f = kf / (kf + 3.0);
                row[k - 1] = f * (rows[k - 1][k - 1] - 1.0);
                for i in 0..k - 1 {
                    row[i] = f * rows[k - 1][i];
                }
            }
        } else {
            // terminal row k = N-1
            let nf = n as f64;
            row[k] = 1.0 + (nf - 1.0) / (g + 1.0);
            if k > 0 {
                let f = (nf - 1.0) / (2.0 * (g + 1.0));
                row[k - 1] = f * (rows[k - 1][k - 1] - 1.0);
                for i in 0..k - 1 {
                    row[i] = f * rows[k - 1][i];
                }
            }
        }
        rows.push(row);
    }
    StepsizeMatrix { n, rows }
}

/// gradient-norm counterpart; equals the anti-transpose of `obl_f_h`
pub fn obl_g_h(n: usize) -> StepsizeMatrix {
    let g = obl_gamma(n);
    let nf = n as f64;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        if k == 0 {
            row[0] = 1.0 + (nf - 1.0) / (g + 1.0);
        } else {
            let kf = k as f64;
            row[k] = 1.0 + 2.0 * (nf - kf - 1.0) / (nf - kf + 2.0);
            let f = (nf - kf - 1.0) / (nf - kf + 2.0);
            row[k - 1] = f * (rows[k - 1][k - 1] - 1.0);
            for i in 0..k - 1 {
                row[i] = f * rows[k - 1][i];
            }
        }
        rows.push(row);
    }
    StepsizeMatrix { n, rows }
}

/// plain gradient descent: h on the diagonal, zero elsewhere
pub fn gd_h(n: usize, h: f64) -> StepsizeMatrix {
    assert!(h > 0.0);
    let rows = (0..n)
        .map(|k| {
            let mut row = vec![0.0; k + 1];
            row[k] = h;
            row
        })
        .collect();
    StepsizeMatrix { n, rows }
}

/// momentum coefficients of the accelerated family indexed by (t, T)
pub fn gogm_coeffs(ts: &TSequence) -> Result<ThreeTermCoeffs, MethodError> {
    ts.check_family_feasible()?;
    let n = ts.n();
    let mut beta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let tk = ts.t[k];
        let tk1 = ts.t[k + 1];
        let bigk = ts.sums[k];
        let bigk1 = ts.sums[k + 1];
        beta.push((bigk - tk) * tk1 / (tk * bigk1));
        gamma.push((tk * tk - bigk) * tk1 / (tk * bigk1));
    }
    Ok(ThreeTermCoeffs::new(beta, gamma))
}

pub fn gogm_h(ts: &TSequence) -> Result<StepsizeMatrix, MethodError> {
    Ok(three_term_to_h(&gogm_coeffs(ts)?))
}

/// dual momentum coefficients; denominators need t_i != 1 at the
/// indices where they divide
pub fn gogm_dual_coeffs(ts: &TSequence) -> Result<ThreeTermCoeffs, MethodError> {
    ts.check_family_feasible()?;
    let n = ts.n();
    let mut beta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let t_hi = ts.t[n - k];
        let big_hi = ts.sums[n - k];
        let t_lo = ts.t[n - k - 1];
        let big_lo = ts.sums[n - k - 1];
        let denom = big_hi * (t_hi - 1.0);
        if denom == 0.0 {
            return Err(MethodError::DivisionGuard { index: k });
        }
        beta.push(big_lo * (t_lo - 1.0) / denom);
        gamma.push((t_hi * t_hi - big_hi) * (t_lo - 1.0) / denom);
    }
    Ok(ThreeTermCoeffs::new(beta, gamma))
}

pub fn gogm_dual_h(ts: &TSequence) -> Result<StepsizeMatrix, MethodError> {
    Ok(three_term_to_h(&gogm_dual_coeffs(ts)?))
}

/// iterates, gradients and values of one run; gradients are stored
/// exactly as consumed by the update so certificates see the same
/// vectors the method did
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<Vec<f64>>,
    pub grads: Vec<Vec<f64>>,
    pub fvals: Vec<f64>,
    pub lipschitz: f64,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.points.len() - 1
    }
}

fn check_finite(x: &[f64], index: usize) -> Result<(), MethodError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(MethodError::Divergence { index })
    }
}

/// run the H-matrix form of the method for H.n steps from x0
pub fn run_fsfom(
    h: &StepsizeMatrix,
    f: &dyn ConvexOracle,
    x0: &[f64],
    lip: f64,
) -> Result<Trajectory, MethodError> {
    assert!(lip > 0.0);
    let n = h.n;
    let mut points = Vec::with_capacity(n + 1);
    let mut grads = Vec::with_capacity(n + 1);
    let mut fvals = Vec::with_capacity(n + 1);
    check_finite(x0, 0)?;
    points.push(x0.to_vec());
    grads.push(f.grad(x0));
    fvals.push(f.value(x0));
    for k in 0..n {
        let mut x = points[k].clone();
        for i in 0..=k {
            let c = h.rows[k][i] / lip;
            for (xj, gj) in x.iter_mut().zip(&grads[i]) {
                *xj -= c * gj;
            }
        }
        check_finite(&x, k + 1)?;
        grads.push(f.grad(&x));
        fvals.push(f.value(&x));
        points.push(x);
    }
    Ok(Trajectory { points, grads, fvals, lipschitz: lip })
}

/// run the momentum (three-term) form directly; agrees with
/// `run_fsfom(three_term_to_h(c), ..)` up to rounding
pub fn run_three_term(
    c: &ThreeTermCoeffs,
    f: &dyn ConvexOracle,
    x0: &[f64],
    lip: f64,
) -> Result<Trajectory, MethodError> {
    assert!(lip > 0.0);
    let n = c.n();
    let mut points = Vec::with_capacity(n + 1);
    let mut grads = Vec::with_capacity(n + 1);
    let mut fvals = Vec::with_capacity(n + 1);
    check_finite(x0, 0)?;
    points.push(x0.to_vec());
    grads.push(f.grad(x0));
    fvals.push(f.value(x0));
    // x_{-1}^+ is taken to be x_0 so the first step is a plain
    // gradient step scaled by 1 + beta_0 + gamma_0
    let mut prev_plus = x0.to_vec();
    for k in 0..n {
        let xk = points[k].clone();
        let plus = linalg::axpy(&xk, -1.0 / lip, &grads[k]);
        let mut x = plus.clone();
        for j in 0..x.len() {
            x[j] += c.beta[k] * (plus[j] - prev_plus[j]) + c.gamma[k] * (plus[j] - xk[j]);
        }
        check_finite(&x, k + 1)?;
        grads.push(f.grad(&x));
        fvals.push(f.value(&x));
        points.push(x);
        prev_plus = plus;
    }
    Ok(Trajectory { points, grads, fvals, lipschitz: lip })
}
