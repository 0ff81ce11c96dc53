//! Test problems: smooth convex oracles with certified smoothness
//! constants, plus composite (smooth + nonsmooth) fixtures built on
//! least squares.

use crate::linalg::{self, Mat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TestbedError {
    #[error("matrix is singular and b is not in its range; no minimizer")]
    NoMinimizer,
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPsd(f64),
}

/// L-smooth convex function with value/gradient access. Minimizer and
/// optimal value are optional; only fixtures that certify them feed
/// the distance-based checks.
pub trait ConvexOracle {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
    /// certified smoothness constant (may be conservative)
    fn lipschitz(&self) -> f64;
    fn minimizer(&self) -> Option<Vec<f64>> {
        None
    }
    fn fstar(&self) -> Option<f64> {
        None
    }
}

/// f(x) = 1/2 x'Ax - b'x with A symmetric PSD
pub struct Quadratic {
    pub a: Mat,
    pub b: Vec<f64>,
    lip: f64,
    xstar: Option<Vec<f64>>,
    fstar: Option<f64>,
}

pub fn make_quadratic(a: Mat, b: Vec<f64>) -> Result<Quadratic, TestbedError> {
    assert_eq!(a.nrows, a.ncols);
    assert_eq!(a.nrows, b.len());
    let eigs = linalg::sym_eigenvalues(&a);
    let lmin = eigs.first().copied().unwrap_or(0.0);
    let scale = eigs.last().copied().unwrap_or(0.0).abs().max(1.0);
    if lmin < -1e-10 * scale {
        return Err(TestbedError::NotPsd(lmin));
    }
    let lip = linalg::power_iteration_lmax(&a, 1e-10, 100_000);
    let xstar = match linalg::lu_solve(&a, &b) {
        Some(x) => x,
        None => {
            // singular: a minimizer exists only if b is in range(A)
            return Err(TestbedError::NoMinimizer);
        }
    };
    let fstar = 0.5 * linalg::dot(&xstar, &a.matvec(&xstar)) - linalg::dot(&b, &xstar);
    Ok(Quadratic { a, b, lip, xstar: Some(xstar), fstar: Some(fstar) })
}

impl ConvexOracle for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * linalg::dot(x, &self.a.matvec(x)) - linalg::dot(&self.b, x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.a.matvec(x);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi -= bi;
        }
        g
    }
    fn lipschitz(&self) -> f64 {
        self.lip
    }
    fn minimizer(&self) -> Option<Vec<f64>> {
        self.xstar.clone()
    }
    fn fstar(&self) -> Option<f64> {
        self.fstar
    }
}

/// f(x) = mu log sum_i exp((a_i'x - b_i)/mu), smoothed max of affine pieces
pub struct LogSumExp {
    pub a: Mat,
    pub b: Vec<f64>,
    pub mu: f64,
    lip: f64,
}

pub fn make_logsumexp(a: Mat, b: Vec<f64>, mu: f64) -> LogSumExp {
    assert!(mu > 0.0);
    assert_eq!(a.nrows, b.len());
    // standard (conservative) bound ||A||_2^2 / mu
    let ata = a.transpose().matmul(&a);
    let lip = linalg::power_iteration_lmax(&ata, 1e-10, 100_000) / mu;
    LogSumExp { a, b, mu, lip }
}

impl LogSumExp {
    // softmax weights with max-shift so exp never overflows
    fn weights(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let z: Vec<f64> = self
            .a
            .matvec(x)
            .iter()
            .zip(&self.b)
            .map(|(ax, bi)| (ax - bi) / self.mu)
            .collect();
        let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = z.iter().map(|&zi| (zi - zmax).exp()).collect();
        let sum: f64 = exps.iter().sum();
        let val = self.mu * (sum.ln() + zmax);
        (exps.iter().map(|e| e / sum).collect(), val)
    }
}

impl ConvexOracle for LogSumExp {
    fn dim(&self) -> usize {
        self.a.ncols
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.weights(x).1
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let (w, _) = self.weights(x);
        let mut g = vec![0.0; self.a.ncols];
        for i in 0..self.a.nrows {
            for j in 0..self.a.ncols {
                g[j] += w[i] * self.a[(i, j)];
            }
        }
        g
    }
    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

/// f(x) = 1/2 ||Ax - b||^2, the smooth half of the composite fixtures
pub struct LeastSquares {
    pub a: Mat,
    pub b: Vec<f64>,
    lip: f64,
}

pub fn make_least_squares(a: Mat, b: Vec<f64>) -> LeastSquares {
    assert_eq!(a.nrows, b.len());
    let ata = a.transpose().matmul(&a);
    let lip = linalg::power_iteration_lmax(&ata, 1e-10, 100_000);
    LeastSquares { a, b, lip }
}

impl ConvexOracle for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols
    }
    fn value(&self, x: &[f64]) -> f64 {
        let r = linalg::sub(&self.a.matvec(x), &self.b);
        0.5 * linalg::norm_sq(&r)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let r = linalg::sub(&self.a.matvec(x), &self.b);
        self.a.transpose().matvec(&r)
    }
    fn lipschitz(&self) -> f64 {
        self.lip
    }
}

/// nonsmooth part of a composite objective, limited to pieces with
/// closed-form prox maps and computable subgradient sets
#[derive(Clone, Debug, PartialEq)]
pub enum Regularizer {
    Zero,
    L1 { lambda: f64 },
    Box { lo: f64, hi: f64 },
}

impl Regularizer {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { lambda } => lambda * x.iter().map(|v| v.abs()).sum::<f64>(),
            Regularizer::Box { lo, hi } => {
                let inside = x.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12);
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// prox_{step * g}(z), coordinatewise
    pub fn prox(&self, z: &[f64], step: f64) -> Vec<f64> {
        match self {
            Regularizer::Zero => z.to_vec(),
            Regularizer::L1 { lambda } => {
                let th = lambda * step;
                z.iter()
                    .map(|&v| {
                        if v > th {
                            v - th
                        } else if v < -th {
                            v + th
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            Regularizer::Box { lo, hi } => z.iter().map(|&v| v.clamp(*lo, *hi)).collect(),
        }
    }

    /// minimal-norm element of grad_f + subdifferential of g at x,
    /// minimized coordinatewise over the subdifferential
    pub fn min_subgradient_norm(&self, x: &[f64], grad_f: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (&xj, &gj) in x.iter().zip(grad_f) {
            let vj = match self {
                Regularizer::Zero => gj,
                Regularizer::L1 { lambda } => {
                    if xj > 0.0 {
                        gj + lambda
                    } else if xj < 0.0 {
                        gj - lambda
                    } else {
                        // subgradient free in [-lambda, lambda]
                        gj + (-gj).clamp(-*lambda, *lambda)
                    }
                }
                Regularizer::Box { lo, hi } => {
                    // at an active bound the normal cone absorbs one sign
                    if (xj - lo).abs() < 1e-12 && gj > 0.0 {
                        0.0
                    } else if (xj - hi).abs() < 1e-12 && gj < 0.0 {
                        0.0
                    } else {
                        gj
                    }
                }
            };
            acc += vj * vj;
        }
        acc.sqrt()
    }
}

/// F = f + g with f smooth (trait object) and g from the prox catalog
pub struct CompositeProblem {
    pub smooth: Box<dyn ConvexOracle>,
    pub reg: Regularizer,
    pub fstar: Option<f64>,
}

impl CompositeProblem {
    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }
    pub fn lipschitz(&self) -> f64 {
        self.smooth.lipschitz()
    }
    pub fn total_value(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.reg.value(x)
    }
}

/// lasso fixture: 1/2||Ax-b||^2 + lambda||x||_1. F* comes from the
/// long reference solve in the composite module.
pub fn make_lasso(a: Mat, b: Vec<f64>, lambda: f64) -> CompositeProblem {
    assert!(lambda >= 0.0);
    let smooth = make_least_squares(a, b);
    let mut prob = CompositeProblem {
        smooth: Box::new(smooth),
        reg: Regularizer::L1 { lambda },
        fstar: None,
    };
    prob.fstar = Some(crate::composite::reference_fstar(&prob));
    prob
}

/// box-constrained least squares: 1/2||Ax-b||^2 + indicator of [lo,hi]^d
pub fn make_box_ls(a: Mat, b: Vec<f64>, lo: f64, hi: f64) -> CompositeProblem {
    assert!(lo <= hi);
    let smooth = make_least_squares(a, b);
    let mut prob = CompositeProblem {
        smooth: Box::new(smooth),
        reg: Regularizer::Box { lo, hi },
        fstar: None,
    };
    prob.fstar = Some(crate::composite::reference_fstar(&prob));
    prob
}

/// central finite-difference gradient check, relative error
pub fn fd_gradient_error(f: &dyn ConvexOracle, x: &[f64], h: f64) -> f64 {
    let g = f.grad(x);
    let mut worst = 0.0_f64;
    let gnorm = linalg::norm(&g).max(1.0);
    for j in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
        worst = worst.max((fd - g[j]).abs() / gnorm);
    }
    worst
}

/// random SPD quadratic with eigenvalues in (0, 1.5]; deterministic per seed
pub fn random_spd_quadratic(rng: &mut ChaCha8Rng, d: usize) -> Quadratic {
    let mut g = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = rng.gen_range(-1.0..1.0);
        }
    }
    let mut a = g.transpose().matmul(&g);
    // scale so the spectrum stays desk sized, and bound away from singular
    let lmax = linalg::power_iteration_lmax(&a, 1e-10, 100_000).max(1e-8);
    a = a.scale(1.4 / lmax);
    for i in 0..d {
        a[(i, i)] += 0.1;
    }
    let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    make_quadratic(a, b).expect("construction guarantees SPD")
}

pub fn random_vec(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-scale..scale)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn quadratic_identity() {
        let q = make_quadratic(Mat::eye(3), vec![0.0; 3]).unwrap();
        assert!((q.lipschitz() - 1.0).abs() < 1e-9);
        assert_eq!(q.minimizer().unwrap(), vec![0.0; 3]);
        assert_eq!(q.fstar().unwrap(), 0.0);
    }

    #[test]
    fn quadratic_diag_lmax() {
        let mut a = Mat::zeros(5, 5);
        for i in 0..5 {
            a[(i, i)] = (i + 1) as f64;
        }
        let q = make_quadratic(a, vec![0.0; 5]).unwrap();
        assert!((q.lipschitz() - 5.0).abs() < 1e-8);
    }

    #[test]
    fn quadratic_rejects_indefinite() {
        let mut a = Mat::eye(2);
        a[(1, 1)] = -1.0;
        assert!(make_quadratic(a, vec![0.0; 2]).is_err());
    }

    #[test]
    fn quadratic_fd_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_spd_quadratic(&mut rng, 10);
        for _ in 0..5 {
            let x = random_vec(&mut rng, 10, 2.0);
            assert!(fd_gradient_error(&q, &x, 1e-6) < 1e-6);
        }
    }

    #[test]
    fn quadratic_grad_vanishes_at_min() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_spd_quadratic(&mut rng, 8);
        let xs = q.minimizer().unwrap();
        assert!(linalg::norm(&q.grad(&xs)) <= 1e-10);
    }

    #[test]
    fn logsumexp_single_row_is_affine() {
        let a = Mat::from_rows(&[vec![1.0, -2.0]]);
        let f = make_logsumexp(a, vec![0.5], 0.7);
        let g1 = f.grad(&[0.0, 0.0]);
        let g2 = f.grad(&[3.0, -1.0]);
        assert!((g1[0] - g2[0]).abs() < 1e-12 && (g1[1] - g2[1]).abs() < 1e-12);
        assert!((g1[0] - 1.0).abs() < 1e-12 && (g1[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn logsumexp_fd_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = Mat::zeros(6, 4);
        for i in 0..6 {
            for j in 0..4 {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let b = random_vec(&mut rng, 6, 1.0);
        let f = make_logsumexp(a, b, 0.5);
        for _ in 0..5 {
            let x = random_vec(&mut rng, 4, 1.0);
            assert!(fd_gradient_error(&f, &x, 1e-6) < 1e-6);
        }
    }

    #[test]
    fn logsumexp_large_mu_smoke() {
        // large smoothing approaches the average of the affine pieces
        let a = Mat::from_rows(&[vec![1.0], vec![-1.0]]);
        let f = make_logsumexp(a, vec![0.0, 0.0], 1e6);
        let g = f.grad(&[0.3]);
        assert!(g[0].abs() < 1e-3);
    }

    #[test]
    fn l1_prox_is_soft_threshold() {
        let r = Regularizer::L1 { lambda: 2.0 };
        let p = r.prox(&[3.0, -0.5, -4.0], 0.5);
        assert_eq!(p, vec![2.0, 0.0, -3.0]);
    }

    #[test]
    fn box_prox_clips() {
        let r = Regularizer::Box { lo: -1.0, hi: 1.0 };
        assert_eq!(r.prox(&[2.0, 0.3, -5.0], 1.0), vec![1.0, 0.3, -1.0]);
    }

    #[test]
    fn lasso_1d_known_solution() {
        // min 1/2 (x - 3)^2 + 1 * |x| has solution x = 2, F = 1/2 + 2
        let prob = make_lasso(Mat::eye(1), vec![3.0], 1.0);
        let fstar = prob.fstar.unwrap();
        assert!((fstar - 2.5).abs() < 1e-10, "fstar = {fstar}");
    }

    #[test]
    fn lasso_lambda_zero_prox_identity() {
        let prob = make_lasso(Mat::eye(2), vec![1.0, -1.0], 0.0);
        assert_eq!(prob.reg.prox(&[0.4, -0.2], 0.7), vec![0.4, -0.2]);
        assert!((prob.fstar.unwrap() - 0.0).abs() < 1e-10);
    }

    #[test]
    fn l1_min_subgradient_brute_force_1d() {
        let r = Regularizer::L1 { lambda: 0.8 };
        // at zero, subgradient spans [-0.8, 0.8]; brute force the min
        for &g in &[1.3, 0.5, -0.2, -2.0] {
            let exact = r.min_subgradient_norm(&[0.0], &[g]);
            let mut brute = f64::INFINITY;
            let mut u = -0.8;
            while u <= 0.8 {
                brute = brute.min((g + u).abs());
                u += 1e-4;
            }
            assert!((exact - brute).abs() < 1e-3, "g={g} exact={exact} brute={brute}");
        }
    }
}
