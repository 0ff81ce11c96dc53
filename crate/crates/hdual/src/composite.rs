//! Composite minimization F = f + g: scaled proximal gradient steps,
//! the composite method runner, the proximal accelerated family
//! (function-value side), the correction matrix C, and the composite
//! gradient-norm family built by dualizing with that correction.

use crate::linalg::{self, Mat};
use crate::method::{
    anti_transpose, dual_three_term, MethodError, StepsizeMatrix, TSequence, ThreeTermCoeffs,
};
use crate::testbed::CompositeProblem;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error("family condition fails at index {index}: {what}")]
    FamilyCondition { index: usize, what: String },
    #[error(transparent)]
    Method(#[from] MethodError),
}

/// the scaled prox-grad step: prox of g/(alpha L) applied to a
/// gradient step of length 1/(alpha L)
pub fn prox_step(prob: &CompositeProblem, y: &[f64], alpha: f64) -> Vec<f64> {
    assert!(alpha > 0.0);
    let lip = prob.lipschitz();
    let z = linalg::axpy(y, -1.0 / (alpha * lip), &prob.smooth.grad(y));
    prob.reg.prox(&z, 1.0 / (alpha * lip))
}

/// norm of L*alpha*(y_plus - y) + grad f(y) + u with the canonical
/// subgradient u of g at y_plus; should vanish for a correct prox
pub fn prox_optimality_residual(prob: &CompositeProblem, y: &[f64], alpha: f64) -> f64 {
    let lip = prob.lipschitz();
    let yp = prox_step(prob, y, alpha);
    let gf = prob.smooth.grad(y);
    // the subgradient forced by optimality; project it into the
    // subdifferential and measure what is left over
    let mut worst_sq = 0.0;
    for j in 0..y.len() {
        let forced = -lip * alpha * (yp[j] - y[j]) - gf[j];
        let resid = match &prob.reg {
            crate::testbed::Regularizer::Zero => forced,
            crate::testbed::Regularizer::L1 { lambda } => {
                if yp[j] > 0.0 {
                    forced - lambda
                } else if yp[j] < 0.0 {
                    forced + lambda
                } else {
                    forced - forced.clamp(-*lambda, *lambda)
                }
            }
            crate::testbed::Regularizer::Box { lo, hi } => {
                if (yp[j] - lo).abs() < 1e-12 && forced < 0.0 {
                    0.0
                } else if (yp[j] - hi).abs() < 1e-12 && forced > 0.0 {
                    0.0
                } else {
                    forced
                }
            }
        };
        worst_sq += resid * resid;
    }
    worst_sq.sqrt()
}

/// generalized prox-grad bracket; nonpositive for valid composite
/// problems, and the composite analogue of the cocoercivity bracket
pub fn prox_grad_bracket(prob: &CompositeProblem, x: &[f64], y: &[f64], alpha: f64) -> f64 {
    let lip = prob.lipschitz();
    let xp = prox_step(prob, x, alpha);
    let yp = prox_step(prob, y, alpha);
    let ymove = linalg::sub(&yp, y);
    prob.total_value(&yp) - prob.total_value(&xp)
        - lip * alpha * linalg::dot(&ymove, &linalg::sub(&xp, &yp))
        - 0.5 * lip * linalg::norm_sq(&ymove)
}

/// one composite run: iterates, their prox points, and F at both
#[derive(Clone, Debug)]
pub struct CompositeTrajectory {
    pub points: Vec<Vec<f64>>,
    pub prox_points: Vec<Vec<f64>>,
    pub fvals: Vec<f64>,
    pub fvals_prox: Vec<f64>,
    pub alpha: f64,
}

fn check_finite(x: &[f64], index: usize) -> Result<(), MethodError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(MethodError::Divergence { index })
    }
}

/// x_{k+1} = x_k - sum_i alpha h_{k+1,i} (x_i - x_i_plus); collapses
/// to the smooth runner when g = 0 and alpha = 1
pub fn run_composite(
    h: &StepsizeMatrix,
    prob: &CompositeProblem,
    x0: &[f64],
    alpha: f64,
) -> Result<CompositeTrajectory, CompositeError> {
    let n = h.n;
    let mut points = Vec::with_capacity(n + 1);
    let mut prox_points = Vec::with_capacity(n + 1);
    let mut fvals = Vec::with_capacity(n + 1);
    let mut fvals_prox = Vec::with_capacity(n + 1);
    check_finite(x0, 0)?;
    let push = |x: Vec<f64>,
                    points: &mut Vec<Vec<f64>>,
                    prox_points: &mut Vec<Vec<f64>>,
                    fvals: &mut Vec<f64>,
                    fvals_prox: &mut Vec<f64>| {
        let xp = prox_step(prob, &x, alpha);
        fvals.push(prob.total_value(&x));
        fvals_prox.push(prob.total_value(&xp));
        prox_points.push(xp);
        points.push(x);
    };
    push(x0.to_vec(), &mut points, &mut prox_points, &mut fvals, &mut fvals_prox);
    for k in 0..n {
        let mut x = points[k].clone();
        for i in 0..=k {
            let c = alpha * h.rows[k][i];
            for j in 0..x.len() {
                x[j] -= c * (points[i][j] - prox_points[i][j]);
            }
        }
        check_finite(&x, k + 1)?;
        push(x, &mut points, &mut prox_points, &mut fvals, &mut fvals_prox);
    }
    Ok(CompositeTrajectory { points, prox_points, fvals, fvals_prox, alpha })
}

/// momentum form of a composite method:
/// y_{k+1} = y_k_plus + beta_k (y_k_plus - y_{k-1}_plus) + gamma_k (y_k_plus - y_k)
/// with y_{-1}_plus = y_0
pub fn run_composite_three_term(
    c: &ThreeTermCoeffs,
    prob: &CompositeProblem,
    y0: &[f64],
    alpha: f64,
) -> Result<CompositeTrajectory, CompositeError> {
    let n = c.n();
    let mut points = vec![y0.to_vec()];
    let mut prox_points = vec![prox_step(prob, y0, alpha)];
    let mut fvals = vec![prob.total_value(y0)];
    let mut fvals_prox = vec![prob.total_value(&prox_points[0])];
    check_finite(y0, 0)?;
    let mut prev_plus = y0.to_vec();
    for k in 0..n {
        let plus = prox_points[k].clone();
        let mut y = plus.clone();
        for j in 0..y.len() {
            y[j] += c.beta[k] * (plus[j] - prev_plus[j]) + c.gamma[k] * (plus[j] - points[k][j]);
        }
        check_finite(&y, k + 1)?;
        let yp = prox_step(prob, &y, alpha);
        fvals.push(prob.total_value(&y));
        fvals_prox.push(prob.total_value(&yp));
        prox_points.push(yp);
        points.push(y);
        prev_plus = plus;
    }
    Ok(CompositeTrajectory { points, prox_points, fvals, fvals_prox, alpha })
}

/// momentum coefficients of the proximal accelerated family; requires
/// T_i <= t_i^2
pub fn gfpgm_coeffs(ts: &TSequence) -> Result<ThreeTermCoeffs, MethodError> {
    ts.check_prox_feasible()?;
    Ok(gfpgm_coeffs_unchecked(ts))
}

// the same algebra without the feasibility gate; the gradient-norm
// family reuses it under its own condition
fn gfpgm_coeffs_unchecked(ts: &TSequence) -> ThreeTermCoeffs {
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
    ThreeTermCoeffs::new(beta, gamma)
}

/// H matrix of the proximal accelerated family (diagonal entry
/// 1 + (t_k - 1) t_{k+1} / T_{k+1})
pub fn gfpgm_h(ts: &TSequence) -> Result<StepsizeMatrix, MethodError> {
    ts.check_prox_feasible()?;
    Ok(gfpgm_h_unchecked(ts))
}

fn gfpgm_h_unchecked(ts: &TSequence) -> StepsizeMatrix {
    let n = ts.n();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        let tk = ts.t[k];
        let tk1 = ts.t[k + 1];
        let bigk = ts.sums[k];
        let bigk1 = ts.sums[k + 1];
        row[k] = 1.0 + (tk - 1.0) * tk1 / bigk1;
        if k > 0 {
            let f = (bigk - tk) * tk1 / (tk * bigk1);
            row[k - 1] = f * (rows[k - 1][k - 1] - 1.0);
            for i in 0..k - 1 {
                row[i] = f * rows[k - 1][i];
            }
        }
        rows.push(row);
    }
    StepsizeMatrix { n, rows }
}

/// lower-triangular correction matrix C, same shape as a stepsize
/// matrix (rows[k][i] = c_{k+1,i})
#[derive(Clone, Debug)]
pub struct CompositeCorrection {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

pub fn build_c(ts: &TSequence) -> CompositeCorrection {
    let n = ts.n();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = vec![0.0; k + 1];
        if k == 0 {
            row[0] = ts.t[1] / ts.sums[1];
        } else {
            let inv_sum: f64 = (0..=k.saturating_sub(2)).take(k.saturating_sub(1)).map(|j| 1.0 / ts.sums[j]).sum();
            row[k] = ts.t[k + 1] / ts.sums[k + 1]
                * (ts.t[k] / ts.sums[0] + ts.t[k] * inv_sum + ts.sums[k] / ts.sums[k - 1]);
            let f = ts.t[k + 1] * (ts.sums[k] - ts.t[k]) / (ts.t[k] * ts.sums[k + 1]);
            for i in 0..k {
                row[i] = f * rows[k - 1][i];
            }
        }
        rows.push(row);
    }
    CompositeCorrection { n, rows }
}

/// residual of the algebraic identity the correction matrix must
/// satisfy; both sides are (N+1)x(N+1) matrices. The product side is
/// taken symmetrized (it only ever enters a symmetric quadratic form)
/// and the diagonal subtraction carries the same t_i^2/T_0 term as the
/// family feasibility condition; see the project notes.
pub fn claim_identity_residual(ts: &TSequence) -> f64 {
    let n = ts.n();
    let dim = n + 1;
    let c = build_c(ts);
    // embedded C with a leading zero row
    let mut cc = Mat::zeros(dim, dim);
    for k in 0..n {
        for i in 0..=k {
            cc[(k + 1, i)] = c.rows[k][i];
        }
    }
    // P = sum_i T_i (e_i - e_{i+1})(e_0 + .. + e_i)'
    let mut p = Mat::zeros(dim, dim);
    for i in 0..dim {
        for col in 0..=i {
            p[(i, col)] += ts.sums[i];
            if i + 1 < dim {
                p[(i + 1, col)] -= ts.sums[i];
            }
        }
    }
    let pc = p.matmul(&cc);
    let lhs = pc.add(&pc.transpose());
    // f_{N-i} = T_i e_i + t_{i+1} e_{i+1} + .. + t_N e_N
    let fvec = |i: usize| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = ts.sums[i];
        for j in (i + 1)..dim {
            v[j] = ts.t[j];
        }
        v
    };
    let mut rhs = Mat::zeros(dim, dim);
    for i in 1..=n {
        rhs.add_outer(1.0 / ts.sums[i - 1], &fvec(i), &fvec(i));
    }
    // f_N corresponds to i = 0 in the f indexing
    rhs.add_outer(1.0 / ts.sums[0], &fvec(0), &fvec(0));
    rhs[(0, 0)] -= ts.sums[0];
    for i in 1..=n {
        let inv_sum: f64 = (0..=i.saturating_sub(2)).take(i.saturating_sub(1)).map(|j| 1.0 / ts.sums[j]).sum();
        rhs[(i, i)] -= ts.sums[i] * ts.sums[i] / ts.sums[i - 1]
            + ts.t[i] * ts.t[i] * (1.0 / ts.sums[0] + inv_sum);
    }
    lhs.sub(&rhs).max_abs()
}

/// feasibility condition for the composite gradient-norm family;
/// reports the first failing index
pub fn sfg_family_condition(ts: &TSequence, alpha: f64) -> Result<(), CompositeError> {
    assert!(alpha > 0.0);
    let n = ts.n();
    let t0 = ts.t[0];
    if alpha * (2.0 * ts.sums[0] - t0 * t0) < ts.sums[0] - 1e-12 {
        return Err(CompositeError::FamilyCondition {
            index: 0,
            what: format!("alpha(2T_0 - t_0^2) = {} < T_0 = {}", alpha * (2.0 * ts.sums[0] - t0 * t0), ts.sums[0]),
        });
    }
    for k in 1..=n {
        let tk = ts.t[k];
        let lhs = alpha * (2.0 * ts.sums[k] - tk * tk);
        let inv_sum: f64 = (0..=k.saturating_sub(2)).take(k.saturating_sub(1)).map(|j| 1.0 / ts.sums[j]).sum();
        let rhs = ts.sums[k] * ts.sums[k] / ts.sums[k - 1] + tk * tk * (1.0 / ts.sums[0] + inv_sum);
        if lhs < rhs - 1e-12 {
            return Err(CompositeError::FamilyCondition {
                index: k,
                what: format!("alpha(2T_k - t_k^2) = {lhs} < {rhs}"),
            });
        }
    }
    Ok(())
}

/// three-term coefficients of the gradient-norm family: the
/// function-value family's beta, its gamma plus the correction column,
/// then the three-term dualization
pub fn sfg_family_coeffs(ts: &TSequence, alpha: f64) -> Result<ThreeTermCoeffs, CompositeError> {
    sfg_family_condition(ts, alpha)?;
    let base = gfpgm_coeffs_unchecked(ts);
    let c = build_c(ts);
    let n = ts.n();
    let gamma: Vec<f64> = (0..n).map(|k| base.gamma[k] + c.rows[k][k] / alpha).collect();
    let primal = ThreeTermCoeffs::new(base.beta, gamma);
    Ok(dual_three_term(&primal)?)
}

/// H matrix of the gradient-norm family: anti-transpose of
/// (1/alpha) H_0 + (1/alpha^2) C
pub fn sfg_family_h(ts: &TSequence, alpha: f64) -> Result<StepsizeMatrix, CompositeError> {
    sfg_family_condition(ts, alpha)?;
    let h0 = gfpgm_h_unchecked(ts);
    let c = build_c(ts);
    let n = ts.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..=k)
                .map(|i| h0.rows[k][i] / alpha + c.rows[k][i] / (alpha * alpha))
                .collect()
        })
        .collect();
    Ok(anti_transpose(&StepsizeMatrix { n, rows }))
}

/// same matrix with the feasibility condition skipped; for numeric
/// experiments with alpha values outside the proven range
pub fn sfg_family_h_experimental(ts: &TSequence, alpha: f64) -> StepsizeMatrix {
    assert!(alpha > 0.0);
    let h0 = gfpgm_h_unchecked(ts);
    let c = build_c(ts);
    let n = ts.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..=k)
                .map(|i| h0.rows[k][i] / alpha + c.rows[k][i] / (alpha * alpha))
                .collect()
        })
        .collect();
    anti_transpose(&StepsizeMatrix { n, rows })
}

/// explicit momentum coefficients of the fixed gradient-norm method
/// (prox scale 4, quadratic growth T_i = (i+2)(i+3)/4); final step
/// carries the 3/10 and 3/40 factors
pub fn sfg_coeffs(n: usize) -> ThreeTermCoeffs {
    assert!(n >= 2, "the fixed method needs at least two steps");
    let nf = n as f64;
    let mut beta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n - 1 {
        let kf = k as f64;
        let denom = (nf - kf + 3.0) * (2.0 * nf - 2.0 * kf + 1.0);
        beta.push((nf - kf + 1.0) * (2.0 * nf - 2.0 * kf - 1.0) / denom);
        gamma.push((4.0 * nf - 4.0 * kf - 1.0) * (2.0 * nf - 2.0 * kf - 1.0) / (6.0 * denom));
    }
    beta.push(3.0 / 10.0);
    gamma.push(3.0 / 40.0);
    ThreeTermCoeffs::new(beta, gamma)
}

/// H matrix (in the composite parameterization, where the runner
/// multiplies entries by alpha) of a composite three-term recursion;
/// the unrolled coefficients carry one factor of alpha already
pub fn composite_three_term_to_h(c: &ThreeTermCoeffs, alpha: f64) -> StepsizeMatrix {
    assert!(alpha > 0.0);
    let h = crate::method::three_term_to_h(c);
    let rows = h.rows.iter().map(|r| r.iter().map(|x| x / alpha).collect()).collect();
    StepsizeMatrix { n: h.n, rows }
}

pub fn sfg_h(n: usize) -> StepsizeMatrix {
    composite_three_term_to_h(&sfg_coeffs(n), SFG_ALPHA)
}

/// prox scale of the fixed gradient-norm method
pub const SFG_ALPHA: f64 = 4.0;

/// rate constant of the fixed method: min subgradient norm squared is
/// at most 50 L (F(y_0) - F*) / ((N+2)(N+3))
pub fn sfg_rate_coefficient(n: usize, lip: f64) -> f64 {
    50.0 * lip / (((n + 2) * (n + 3)) as f64)
}

#[derive(Clone, Debug)]
pub struct GradientMappingBound {
    /// L (alpha + 1) ||y - y_plus||, always available
    pub surrogate: f64,
    /// minimal subgradient norm of F at y_plus, when g admits it
    pub exact: Option<f64>,
}

pub fn gradient_mapping_bound(
    prob: &CompositeProblem,
    y: &[f64],
    alpha: f64,
) -> GradientMappingBound {
    let lip = prob.lipschitz();
    let yp = prox_step(prob, y, alpha);
    let surrogate = lip * (alpha + 1.0) * linalg::norm(&linalg::sub(y, &yp));
    let exact = Some(prob.reg.min_subgradient_norm(&yp, &prob.smooth.grad(&yp)));
    GradientMappingBound { surrogate, exact }
}

/// reference solve used to stamp F* (and an approximate minimizer)
/// into composite fixtures: the proximal accelerated family with
/// T_i = t_i^2 run until F stalls at 1e-12 relative
pub fn reference_solve(prob: &CompositeProblem) -> (Vec<f64>, f64) {
    let d = prob.dim();
    let x0 = vec![0.0; d];
    // coefficients of the incremental momentum loop do not depend on
    // the horizon when T_i = t_i^2, so just iterate
    let mut t_prev = 1.0_f64;
    let mut x = x0.clone();
    let mut prev_plus = x0.clone();
    let mut best_f = prob.total_value(&x0);
    let mut best_x = x0;
    let mut stall = 0usize;
    for _ in 0..200_000 {
        let plus = prox_step(prob, &x, 1.0);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt());
        let m = (t_prev - 1.0) / t_next;
        let mut xn = plus.clone();
        for j in 0..d {
            xn[j] += m * (plus[j] - prev_plus[j]);
        }
        let f = prob.total_value(&plus);
        if f < best_f - 1e-12 * best_f.abs().max(1.0) {
            best_f = f;
            best_x = plus.clone();
            stall = 0;
        } else {
            if f < best_f {
                best_f = f;
                best_x = plus.clone();
            }
            stall += 1;
            if stall > 200 {
                break;
            }
        }
        prev_plus = plus;
        x = xn;
        t_prev = t_next;
    }
    (best_x, best_f)
}

/// F* for a composite fixture
pub fn reference_fstar(prob: &CompositeProblem) -> f64 {
    reference_solve(prob).1
}
