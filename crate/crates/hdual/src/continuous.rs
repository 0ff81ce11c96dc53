//! Continuous-time methods: X'(t) = -int_0^t H(t,s) grad f(X(s)) ds.
//! For the power-family kernels this is a second order ODE with a
//! singular friction term, integrated here with an adaptive embedded
//! Runge-Kutta pair. Reversing the kernel in time swaps the
//! function-value rate with a terminal gradient-norm rate, mirroring
//! the discrete anti-transpose.

use crate::linalg;
use crate::testbed::ConvexOracle;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ContinuousError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
}

/// power-family kernel H(t,s) = C p^2 s^{2p-1} / t^{p+1} on 0 < s < t < T
#[derive(Clone, Copy, Debug)]
pub struct ContinuousKernel {
    pub t_end: f64,
    pub p: f64,
    pub c: f64,
}

impl ContinuousKernel {
    pub fn new(t_end: f64, p: f64, c: f64) -> Self {
        assert!(t_end > 0.0 && p >= 2.0 && c > 0.0);
        ContinuousKernel { t_end, p, c }
    }

    pub fn h(&self, t: f64, s: f64) -> f64 {
        self.c * self.p * self.p * s.powf(2.0 * self.p - 1.0) / t.powf(self.p + 1.0)
    }

    /// the time-reversed kernel H(T-s, T-t)
    pub fn h_dual(&self, t: f64, s: f64) -> f64 {
        self.h(self.t_end - s, self.t_end - t)
    }

    /// function-value weight u(t) = C t^p
    pub fn u_weight(&self, t: f64) -> f64 {
        self.c * t.powf(self.p)
    }

    /// gradient-norm weight v(t) = 1 / u(T - t)
    pub fn v_weight(&self, t: f64) -> f64 {
        1.0 / self.u_weight(self.t_end - t)
    }

    pub fn u_weight_deriv(&self, t: f64) -> f64 {
        self.c * self.p * t.powf(self.p - 1.0)
    }

    pub fn v_weight_deriv(&self, t: f64) -> f64 {
        self.p / (self.c * (self.t_end - t).powf(self.p + 1.0))
    }

    /// friction coefficient of the primal ODE at time t, (p+1)/t
    pub fn primal_friction(&self, t: f64) -> f64 {
        (self.p + 1.0) / t
    }

    /// friction of the dual ODE, (2p-1)/(T-t)
    pub fn dual_friction(&self, t: f64) -> f64 {
        (2.0 * self.p - 1.0) / (self.t_end - t)
    }
}

/// sampled second-order trajectory on the accepted-step grid
#[derive(Clone, Debug)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub grads: Vec<Vec<f64>>,
    pub fvals: Vec<f64>,
    /// state at the terminal time (extrapolated when the grid stops
    /// short of it)
    pub terminal_state: Vec<f64>,
    pub terminal_grad: Vec<f64>,
    pub t_end: f64,
}

const RTOL: f64 = 1e-8;
const ATOL: f64 = 1e-10;

// Dormand-Prince 5(4) tableau
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

// x'' + friction(t) x' + coef(t) grad f(x) = 0, first-order form
struct SecondOrderOde<'a> {
    f: &'a dyn ConvexOracle,
    friction: Box<dyn Fn(f64) -> f64 + 'a>,
    coef: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl SecondOrderOde<'_> {
    fn rhs(&self, t: f64, state: &[f64]) -> Vec<f64> {
        let d = state.len() / 2;
        let (x, v) = state.split_at(d);
        let g = self.f.grad(x);
        let fr = (self.friction)(t);
        let cf = (self.coef)(t);
        let mut out = Vec::with_capacity(2 * d);
        out.extend_from_slice(v);
        for j in 0..d {
            out.push(-fr * v[j] - cf * g[j]);
        }
        out
    }
}

// one adaptive integration from t0 to t1 (t1 > t0), recording every
// accepted step
fn integrate(
    ode: &SecondOrderOde,
    t0: f64,
    t1: f64,
    state0: Vec<f64>,
    record: &mut dyn FnMut(f64, &[f64]),
) -> Result<(), ContinuousError> {
    let mut t = t0;
    let mut y = state0;
    let mut h = (t1 - t0) * 1e-4;
    let hmin = (t1 - t0) * 1e-14;
    // cap the step so the trapezoid rules downstream see a fine grid;
    // the integrator itself would take much larger steps
    let hmax = (t1 - t0) / 4000.0;
    record(t, &y);
    let mut k: Vec<Vec<f64>> = vec![Vec::new(); 7];
    while t < t1 {
        if h < hmin {
            return Err(ContinuousError::StepUnderflow { t });
        }
        if t + h > t1 {
            h = t1 - t;
        }
        for i in 0..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = DP_A[i][j];
                if a != 0.0 {
                    for (yv, kv) in yi.iter_mut().zip(kj) {
                        *yv += h * a * kv;
                    }
                }
            }
            k[i] = ode.rhs(t + DP_C[i] * h, &yi);
        }
        let mut y5 = y.clone();
        let mut err: f64 = 0.0;
        for j in 0..y.len() {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..7 {
                d5 += DP_B5[i] * k[i][j];
                d4 += DP_B4[i] * k[i][j];
            }
            y5[j] += h * d5;
            let sc = ATOL + RTOL * y[j].abs().max(y5[j].abs());
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            record(t, &y);
        }
        // standard PI-free step control with safety factor
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(hmax);
    }
    Ok(())
}

fn build_trajectory(
    f: &dyn ConvexOracle,
    times: Vec<f64>,
    raw: Vec<Vec<f64>>,
    t_end: f64,
    extrapolate_terminal: bool,
) -> OdeTrajectory {
    let d = raw[0].len() / 2;
    let states: Vec<Vec<f64>> = raw.iter().map(|s| s[..d].to_vec()).collect();
    let velocities: Vec<Vec<f64>> = raw.iter().map(|s| s[d..].to_vec()).collect();
    let grads: Vec<Vec<f64>> = states.iter().map(|x| f.grad(x)).collect();
    let fvals: Vec<f64> = states.iter().map(|x| f.value(x)).collect();
    let (terminal_state, terminal_grad) = if extrapolate_terminal {
        let m = times.len();
        assert!(m >= 3);
        let idx = [m - 3, m - 2, m - 1];
        let ts: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
        // quadratic (three-point Richardson) extrapolation to t_end
        let lag = |vals: [&[f64]; 3]| -> Vec<f64> {
            let mut out = vec![0.0; d];
            for a in 0..3 {
                let mut w = 1.0;
                for b in 0..3 {
                    if a != b {
                        w *= (t_end - ts[b]) / (ts[a] - ts[b]);
                    }
                }
                for j in 0..d {
                    out[j] += w * vals[a][j];
                }
            }
            out
        };
        let xs = lag([&states[idx[0]], &states[idx[1]], &states[idx[2]]]);
        let gs = lag([&grads[idx[0]], &grads[idx[1]], &grads[idx[2]]]);
        (xs, gs)
    } else {
        (states.last().unwrap().clone(), grads.last().unwrap().clone())
    };
    OdeTrajectory { times, states, velocities, grads, fvals, terminal_state, terminal_grad, t_end }
}

// series start for x'' + (a/t)x' + c0 t^m grad f = 0 near t = 0:
// x ~ x0 + b t^{m+2} g0 with b = -c0 / ((m+2)(m+1+a))
fn singular_start(
    f: &dyn ConvexOracle,
    x0: &[f64],
    eps: f64,
    a: f64,
    c0: f64,
    m: f64,
) -> Vec<f64> {
    let g0 = f.grad(x0);
    let b = -c0 / ((m + 2.0) * (m + 1.0 + a));
    let mut state = Vec::with_capacity(2 * x0.len());
    for (x, g) in x0.iter().zip(&g0) {
        state.push(x + b * eps.powf(m + 2.0) * g);
    }
    for g in &g0 {
        state.push(b * (m + 2.0) * eps.powf(m + 1.0) * g);
    }
    state
}

/// integrate x'' + ((p+1)/t) x' + C p^2 t^{p-2} grad f = 0 from a
/// series start at eps = 1e-6 T up to T
pub fn integrate_primal(
    p: f64,
    c: f64,
    t_end: f64,
    f: &dyn ConvexOracle,
    x0: &[f64],
) -> Result<OdeTrajectory, ContinuousError> {
    assert!(p >= 2.0 && c > 0.0 && t_end > 0.0);
    let eps = 1e-6 * t_end;
    let state0 = singular_start(f, x0, eps, p + 1.0, c * p * p, p - 2.0);
    let ode = SecondOrderOde {
        f,
        friction: Box::new(move |t| (p + 1.0) / t),
        coef: Box::new(move |t| c * p * p * t.powf(p - 2.0)),
    };
    let mut times = Vec::new();
    let mut raw = Vec::new();
    integrate(&ode, eps, t_end, state0, &mut |t, y| {
        times.push(t);
        raw.push(y.to_vec());
    })?;
    Ok(build_trajectory(f, times, raw, t_end, false))
}

/// integrate y'' + ((2p-1)/(T-t)) y' + C p^2 (T-t)^{p-2} grad f = 0
/// from rest at t = 0 up to T - eps, extrapolating the terminal
/// state and gradient
pub fn integrate_dual(
    p: f64,
    c: f64,
    t_end: f64,
    f: &dyn ConvexOracle,
    y0: &[f64],
) -> Result<OdeTrajectory, ContinuousError> {
    assert!(p >= 2.0 && c > 0.0 && t_end > 0.0);
    let eps = 1e-6 * t_end;
    let mut state0 = y0.to_vec();
    state0.extend(std::iter::repeat(0.0).take(y0.len()));
    let ode = SecondOrderOde {
        f,
        friction: Box::new(move |t| (2.0 * p - 1.0) / (t_end - t)),
        coef: Box::new(move |t| c * p * p * (t_end - t).powf(p - 2.0)),
    };
    let mut times = Vec::new();
    let mut raw = Vec::new();
    integrate(&ode, 0.0, t_end - eps, state0, &mut |t, y| {
        times.push(t);
        raw.push(y.to_vec());
    })?;
    Ok(build_trajectory(f, times, raw, t_end, true))
}

/// the power-r pair x'' + (r/t) x' + grad f = 0 (kernel s^r/t^r);
/// used by the sum-of-squares identity checks
pub fn integrate_primal_r(
    r: f64,
    t_end: f64,
    f: &dyn ConvexOracle,
    x0: &[f64],
) -> Result<OdeTrajectory, ContinuousError> {
    assert!(r >= 3.0 && t_end > 0.0);
    let eps = 1e-6 * t_end;
    let state0 = singular_start(f, x0, eps, r, 1.0, 0.0);
    let ode = SecondOrderOde {
        f,
        friction: Box::new(move |t| r / t),
        coef: Box::new(|_| 1.0),
    };
    let mut times = Vec::new();
    let mut raw = Vec::new();
    integrate(&ode, eps, t_end, state0, &mut |t, y| {
        times.push(t);
        raw.push(y.to_vec());
    })?;
    Ok(build_trajectory(f, times, raw, t_end, false))
}

pub fn integrate_dual_r(
    r: f64,
    t_end: f64,
    f: &dyn ConvexOracle,
    y0: &[f64],
) -> Result<OdeTrajectory, ContinuousError> {
    assert!(r >= 3.0 && t_end > 0.0);
    let eps = 1e-6 * t_end;
    let mut state0 = y0.to_vec();
    state0.extend(std::iter::repeat(0.0).take(y0.len()));
    let ode = SecondOrderOde {
        f,
        friction: Box::new(move |t| r / (t_end - t)),
        coef: Box::new(|_| 1.0),
    };
    let mut times = Vec::new();
    let mut raw = Vec::new();
    integrate(&ode, 0.0, t_end - eps, state0, &mut |t, y| {
        times.push(t);
        raw.push(y.to_vec());
    })?;
    Ok(build_trajectory(f, times, raw, t_end, true))
}

// cumulative trapezoid of integrand samples over traj.times
fn cumtrapz(times: &[f64], vals: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..times.len() {
        acc += 0.5 * (vals[i] + vals[i - 1]) * (times[i] - times[i - 1]);
        out.push(acc);
    }
    out
}

/// sampled function-value energy
/// U(t) = 1/2 ||X(0)-x*||^2 + int_0^t u'(s)(f(X)-f* + <grad, x*-X>) ds;
/// nonincreasing because the convexity bracket is nonpositive
pub fn energy_curve_primal(
    traj: &OdeTrajectory,
    uprime: &dyn Fn(f64) -> f64,
    xstar: &[f64],
    fstar: f64,
) -> Vec<f64> {
    let base = 0.5 * linalg::norm_sq(&linalg::sub(&traj.states[0], xstar));
    let integrand: Vec<f64> = (0..traj.times.len())
        .map(|i| {
            let bracket = traj.fvals[i] - fstar
                + linalg::dot(&traj.grads[i], &linalg::sub(xstar, &traj.states[i]));
            uprime(traj.times[i]) * bracket
        })
        .collect();
    cumtrapz(&traj.times, &integrand).into_iter().map(|w| base + w).collect()
}

/// sampled gradient-norm energy
/// V(t) = v(0)(f(Y(0))-f(Y(T))) + int_0^t v'(s)(f(Y(s))-f(Y(T)) + <grad, Y(T)-Y(s)>) ds
pub fn energy_curve_dual(
    traj: &OdeTrajectory,
    v0: f64,
    vprime: &dyn Fn(f64) -> f64,
) -> Vec<f64> {
    let f_end = {
        // value at the extrapolated terminal point is not sampled;
        // approximate it with the last grid value plus first-order
        // correction along the gradient
        let last = traj.fvals[traj.fvals.len() - 1];
        let dx = linalg::sub(&traj.terminal_state, traj.states.last().unwrap());
        last + linalg::dot(traj.grads.last().unwrap(), &dx)
    };
    let base = v0 * (traj.fvals[0] - f_end);
    // the bracket decays like (T-s)^4 while v' grows like (T-s)^-3;
    // inside the last 1e-3 T the bracket is below float cancellation
    // noise, so freeze the (physically negligible, nonpositive)
    // integrand there instead of integrating noise
    let tail = 1e-3 * traj.t_end;
    let integrand: Vec<f64> = (0..traj.times.len())
        .map(|i| {
            if traj.t_end - traj.times[i] < tail {
                return 0.0;
            }
            let bracket = traj.fvals[i] - f_end
                + linalg::dot(
                    &traj.grads[i],
                    &linalg::sub(&traj.terminal_state, &traj.states[i]),
                );
            vprime(traj.times[i]) * bracket
        })
        .collect();
    cumtrapz(&traj.times, &integrand).into_iter().map(|w| base + w).collect()
}

/// how far the dual velocity has converged to its predicted terminal
/// scaling: returns Ydot(t)/(T-t)^{p-1} at the last grid point and the
/// prediction C p grad f(Y(T)) for comparison
pub fn terminal_velocity_ratio(traj: &OdeTrajectory, p: f64, c: f64) -> (Vec<f64>, Vec<f64>) {
    let i = traj.times.len() - 1;
    let rem = traj.t_end - traj.times[i];
    let scaled: Vec<f64> = traj.velocities[i].iter().map(|v| v / rem.powf(p - 1.0)).collect();
    let predicted: Vec<f64> = traj.terminal_grad.iter().map(|g| -c * p * g).collect();
    (scaled, predicted)
}

/// relative residual of the closed-form sum-of-squares expression for
/// U(T) - u(T)(f-gap) with u(t) = t^2/(2(r-1)), kernel s^r/t^r
pub fn sos_identity_primal(
    r: f64,
    traj: &OdeTrajectory,
    xstar: &[f64],
    fstar: f64,
) -> f64 {
    let t_end = traj.t_end;
    let uprime = |s: f64| s / (r - 1.0);
    let u_curve = energy_curve_primal(traj, &uprime, xstar, fstar);
    let u_t = *u_curve.last().unwrap();
    let lhs = u_t - t_end * t_end / (2.0 * (r - 1.0)) * (traj.fvals.last().unwrap() - fstar);
    let xlast = traj.states.last().unwrap();
    let vlast = traj.velocities.last().unwrap();
    let mut bvec = Vec::with_capacity(xlast.len());
    for j in 0..xlast.len() {
        bvec.push(t_end * vlast[j] + 2.0 * (xlast[j] - xstar[j]));
    }
    let boundary = (linalg::norm_sq(&bvec)
        + 2.0 * (r - 3.0) * linalg::norm_sq(&linalg::sub(xlast, xstar)))
        / (4.0 * (r - 1.0));
    let integrand: Vec<f64> = (0..traj.times.len())
        .map(|i| {
            (r - 3.0) * traj.times[i] / (2.0 * (r - 1.0)) * linalg::norm_sq(&traj.velocities[i])
        })
        .collect();
    let rhs = boundary + cumtrapz(&traj.times, &integrand).last().unwrap();
    // relative to the natural energy scale so the r=3 case (both
    // sides collapse to one square) does not divide by near-zero
    let scale = u_curve[0].abs().max(lhs.abs()).max(rhs.abs()).max(1e-30);
    (lhs - rhs).abs() / scale
}

/// relative residual of the dual identity
/// V(T) - 1/2||grad f(Y(T))||^2 = boundary square + integral of squares,
/// with v(t) = 2(r-1)/(T-t)^2
pub fn sos_identity_dual(r: f64, traj: &OdeTrajectory) -> f64 {
    let t_end = traj.t_end;
    let v0 = 2.0 * (r - 1.0) / (t_end * t_end);
    let vprime = |s: f64| 4.0 * (r - 1.0) / (t_end - s).powi(3);
    let v_curve = energy_curve_dual(traj, v0, &vprime);
    let lhs = v_curve.last().unwrap() - 0.5 * linalg::norm_sq(&traj.terminal_grad);
    let boundary = 2.0 * (r - 1.0) * (r - 3.0)
        * linalg::norm_sq(&linalg::sub(&traj.states[0], &traj.terminal_state))
        / t_end.powi(4);
    let integrand: Vec<f64> = (0..traj.times.len())
        .map(|i| {
            let rem = t_end - traj.times[i];
            let mut sq = Vec::with_capacity(traj.states[i].len());
            for j in 0..traj.states[i].len() {
                sq.push(
                    rem * traj.velocities[i][j]
                        + 2.0 * (traj.states[i][j] - traj.terminal_state[j]),
                );
            }
            // numerator vanishes like (T-s)^3 so the integrand is
            // O(T-s) and the trapezoid handles the endpoint fine
            2.0 * (r - 1.0) * (r - 3.0) * linalg::norm_sq(&sq) / rem.powi(5)
        })
        .collect();
    let rhs = boundary + cumtrapz(&traj.times, &integrand).last().unwrap();
    let scale = v_curve[0].abs().max(lhs.abs()).max(rhs.abs()).max(1e-30);
    (lhs - rhs).abs() / scale
}
