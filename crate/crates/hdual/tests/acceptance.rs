//! End-to-end acceptance checks. Each test covers one criterion and
//! prints a single pass line; tolerances are pinned next to the code
//! that uses them.

use hdual::certify::{
    build_s, build_t, energy_u, energy_v, gd_gradient_corollary_bound, gd_u, gd_v,
    gogm_dual_v, gogm_u, obl_u, obl_v, ogm_u, ogmg_v, quadratic_form, raw_u_from_bundle,
    raw_v_from_bundle, verify_congruence, GradientBundle, WeightSequence,
};
use hdual::composite::{
    claim_identity_residual, gradient_mapping_bound, prox_optimality_residual, run_composite,
    sfg_family_h, sfg_h, sfg_rate_coefficient,
};
use hdual::continuous::{
    energy_curve_dual, energy_curve_primal, integrate_dual, integrate_primal, ContinuousKernel,
};
use hdual::linalg;
use hdual::method::{
    anti_transpose, dual_three_term, gd_h, gogm_dual_h, gogm_h, obl_f_h, obl_g_h, ogm_h, ogmg_h,
    run_fsfom, run_three_term, theta_sequence, three_term_to_h, StepsizeMatrix, TSequence,
    ThreeTermCoeffs,
};
use hdual::testbed::{
    fd_gradient_error, make_lasso, random_spd_quadratic, random_vec, ConvexOracle,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_h(rng: &mut ChaCha8Rng, n: usize) -> StepsizeMatrix {
    let rows = (0..n)
        .map(|k| (0..=k).map(|_| rng.gen_range(-1.0..2.0)).collect())
        .collect();
    StepsizeMatrix::new(rows).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightSequence {
    WeightSequence::new((0..=n).map(|_| rng.gen_range(0.1..5.0)).collect())
}

fn random_bundle(rng: &mut ChaCha8Rng, n: usize, d: usize) -> GradientBundle {
    GradientBundle {
        g: (0..=n).map(|_| random_vec(rng, d, 1.0)).collect(),
    }
}

#[test]
fn criterion_1_anti_transpose_dualities() {
    const TOL: f64 = 1e-12;
    let start = Instant::now();
    for n in 1..=50 {
        let d1 = ogmg_h(n).max_rel_diff(&anti_transpose(&ogm_h(n)));
        assert!(d1 <= TOL, "ogm pair at n = {n}: {d1:e}");
        let d2 = obl_g_h(n).max_rel_diff(&anti_transpose(&obl_f_h(n)));
        assert!(d2 <= TOL, "obl pair at n = {n}: {d2:e}");
        let g = gd_h(n, 0.7);
        assert_eq!(g.rows, anti_transpose(&g).rows, "gd not self-dual at n = {n}");
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}");
    println!("criterion 1 pass: anti-transpose dualities, N = 1..50, tol 1e-12, {dt:?}");
}

#[test]
fn criterion_2_zero_and_diagonal_certificates() {
    const TOL: f64 = 1e-9;
    for n in 1..=30 {
        let s = build_s(&ogm_h(n), &ogm_u(n));
        assert!(s.mat.max_abs() <= TOL, "S(ogm) at n = {n}: {:e}", s.mat.max_abs());
        let t = build_t(&ogmg_h(n), &ogmg_v(n));
        assert!(t.mat.max_abs() <= TOL, "T(ogmg) at n = {n}: {:e}", t.mat.max_abs());

        let u = obl_u(n);
        let s = build_s(&obl_f_h(n), &u);
        for i in 0..=n {
            for j in 0..=n {
                let want = if i == j {
                    (u.values[i] - if i == 0 { 0.0 } else { u.values[i - 1] }) / 2.0
                } else {
                    0.0
                };
                assert!(
                    (s.mat[(i, j)] - want).abs() <= TOL,
                    "S(obl) entry ({i},{j}) at n = {n}"
                );
            }
        }
    }
    println!("criterion 2 pass: zero/diagonal certificates, N <= 30, tol 1e-9");
}

#[test]
fn criterion_3_congruence_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let n = rng.gen_range(1..=15);
        let h = random_h(&mut rng, n);
        let u = random_weights(&mut rng, n);
        let rep = verify_congruence(&h, &u);
        // pass criterion inside the report: residual <= 1e-9 max(1, ||S||_max)
        assert!(rep.pass, "case {case}: residual {:e} vs s_max {:e}", rep.residual, rep.s_max);
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 5.0, "took {dt:?}");
    println!("criterion 3 pass: congruence on 200 random (H, u), N <= 15, {dt:?}");
}

#[test]
fn criterion_4_trace_form_oracle() {
    const TOL: f64 = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(4044);
    for case in 0..100 {
        let n = rng.gen_range(1..=12);
        let h = random_h(&mut rng, n);
        let u = random_weights(&mut rng, n);
        let lip = rng.gen_range(0.5..3.0);
        let b = random_bundle(&mut rng, n, 4);

        let s = build_s(&h, &u);
        let raw = raw_u_from_bundle(&h, &u, &b, lip);
        let qf = quadratic_form(&s, &b, lip);
        assert!((raw - qf).abs() <= TOL * raw.abs().max(1.0), "case {case} S path");

        let ha = anti_transpose(&h);
        let v = u.reciprocal_reversed();
        let t = build_t(&ha, &v);
        let raw = raw_v_from_bundle(&ha, &v, &b, lip);
        let qf = quadratic_form(&t, &b, lip);
        assert!((raw - qf).abs() <= TOL * raw.abs().max(1.0), "case {case} T path");
    }
    println!("criterion 4 pass: trace oracle on 100 bundles, both paths, rel 1e-8");
}

// the catalog runs shared by criteria 5 and 8
struct CatalogRun {
    name: &'static str,
    traj: hdual::method::Trajectory,
    u: Option<WeightSequence>,
    v: Option<WeightSequence>,
}

fn catalog_runs(seed: u64, d: usize, n: usize) -> (Vec<CatalogRun>, Vec<f64>, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_spd_quadratic(&mut rng, d);
    let x0 = random_vec(&mut rng, d, 1.0);
    let lip = q.lipschitz();
    let xs = q.minimizer().unwrap();
    let fs = q.fstar().unwrap();
    let ts = TSequence::quadratic(n);
    let mut runs = Vec::new();
    let mut push = |name, h: StepsizeMatrix, u, v| {
        runs.push(CatalogRun {
            name,
            traj: run_fsfom(&h, &q, &x0, lip).unwrap(),
            u,
            v,
        });
    };
    push("ogm", ogm_h(n), Some(ogm_u(n)), None);
    push("gogm", gogm_h(&ts).unwrap(), Some(gogm_u(&ts)), None);
    push("gd h=0.5", gd_h(n, 0.5), Some(gd_u(n, 0.5)), Some(gd_v(n, 0.5)));
    push("gd h=1.0", gd_h(n, 1.0), Some(gd_u(n, 1.0)), Some(gd_v(n, 1.0)));
    push("ogmg", ogmg_h(n), None, Some(ogmg_v(n)));
    push("obl-g", obl_g_h(n), None, Some(obl_v(n)));
    push("gogm-dual", gogm_dual_h(&ts).unwrap(), None, Some(gogm_dual_v(&ts)));
    (runs, xs, fs, lip)
}

#[test]
fn criterion_5_rate_reproduction() {
    const SLACK: f64 = 1e-8;
    let start = Instant::now();
    let n = 25;
    for seed in 0..30u64 {
        let (runs, xs, fs, lip) = catalog_runs(seed, 10, n);
        let x0 = &runs[0].traj.points[0];
        let r2 = linalg::norm_sq(&linalg::sub(x0, &xs));
        let gap0 = runs[0].traj.fvals[0] - fs;
        for run in &runs {
            if let Some(u) = &run.u {
                let bound = lip * r2 / (2.0 * u.values[n]);
                let gap = run.traj.fvals[n] - fs;
                assert!(gap <= bound + SLACK, "{} seed {seed}: {gap:e} > {bound:e}", run.name);
            }
            if let Some(v) = &run.v {
                let gm = linalg::norm_sq(&run.traj.grads[n]) / (2.0 * lip);
                let bound = v.values[0] * gap0;
                assert!(gm <= bound + SLACK, "{} seed {seed}: {gm:e} > {bound:e}", run.name);
            }
        }
        // gd min-bound corollary for both stepsizes
        for (idx, h) in [(2usize, 0.5), (3, 1.0)] {
            let run = &runs[idx];
            let cb = gd_gradient_corollary_bound(n, h).unwrap();
            let gm = linalg::norm_sq(&run.traj.grads[n]) / (2.0 * lip);
            let bound = (cb.fgap_coeff * gap0).min(cb.dist_coeff * lip * r2);
            assert!(gm <= bound + SLACK, "gd corollary h = {h} seed {seed}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "took {dt:?}");
    println!("criterion 5 pass: catalog rates on 30 quadratics, d = 10, N = 25, {dt:?}");
}

#[test]
fn criterion_6_sfg() {
    let start = Instant::now();
    // (a) the fixed method is the alpha = 4 family instance
    for n in 2..=30 {
        let ts = TSequence::sfg(n);
        let fam = sfg_family_h(&ts, 4.0).unwrap();
        let diff = sfg_h(n).max_rel_diff(&fam);
        assert!(diff <= 1e-10, "n = {n}: {diff:e}");
    }
    // (b) lasso rate, 10 seeded instances
    let n = 100;
    let d = 50;
    let h = sfg_h(n);
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = linalg::Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] = rng.gen_range(-1.0..1.0) / (d as f64).sqrt();
            }
        }
        let b = random_vec(&mut rng, d, 1.0);
        let prob = make_lasso(a, b, 0.1);
        let y0 = random_vec(&mut rng, d, 1.0);
        let lip = prob.lipschitz();
        let gap0 = prob.total_value(&y0) - prob.fstar.unwrap();
        let traj = run_composite(&h, &prob, &y0, 4.0).unwrap();
        let gm = gradient_mapping_bound(&prob, &traj.points[n], 4.0);
        let measured = gm.exact.unwrap_or(gm.surrogate).powi(2);
        let bound = sfg_rate_coefficient(n, lip) * gap0;
        assert!(measured <= bound, "seed {seed}: {measured:e} > {bound:e}");
    }
    // (c) correction-matrix identity
    for n in 1..=12 {
        for ts in [TSequence::sfg(n.max(2)), TSequence::quadratic(n)] {
            let res = claim_identity_residual(&ts);
            assert!(res <= 1e-10, "n = {n}: {res:e}");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}");
    println!("criterion 6 pass: family instance 1e-10, 10 lasso runs, identity 1e-10, {dt:?}");
}

fn assert_monotone(curve: &[f64], rel: f64, what: &str) {
    let scale = curve.iter().fold(0.0_f64, |m, &e| m.max(e.abs())).max(1.0);
    for w in curve.windows(2) {
        assert!(w[1] <= w[0] + rel * scale, "{what}: {} -> {}", w[0], w[1]);
    }
}

#[test]
fn criterion_7_continuous_time() {
    let start = Instant::now();
    let t_end = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let q = random_spd_quadratic(&mut rng, 6);
    let x0 = random_vec(&mut rng, 6, 1.0);
    let xs = q.minimizer().unwrap();
    let fs = q.fstar().unwrap();
    let r2 = linalg::norm_sq(&linalg::sub(&x0, &xs));
    let gap0 = q.value(&x0) - fs;
    for p in [2.0, 3.0] {
        for c in [0.5, 1.0] {
            let kern = ContinuousKernel::new(t_end, p, c);
            let traj = integrate_primal(p, c, t_end, &q, &x0).unwrap();
            let gap = traj.fvals.last().unwrap() - fs;
            let bound = r2 / (2.0 * c * t_end.powf(p));
            assert!(gap <= 1.05 * bound, "primal p = {p} C = {c}: {gap:e} > {bound:e}");
            let u_curve = energy_curve_primal(&traj, &|t| kern.u_weight_deriv(t), &xs, fs);
            assert_monotone(&u_curve, 1e-6, "U(t)");

            let traj = integrate_dual(p, c, t_end, &q, &x0).unwrap();
            let gn2 = 0.5 * linalg::norm_sq(&traj.terminal_grad);
            let bound = gap0 / (c * t_end.powf(p));
            assert!(gn2 <= 1.05 * bound, "dual p = {p} C = {c}: {gn2:e} > {bound:e}");
            let v_curve =
                energy_curve_dual(&traj, kern.v_weight(0.0), &|t| kern.v_weight_deriv(t));
            assert_monotone(&v_curve, 1e-6, "V(t)");
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}");
    println!("criterion 7 pass: ODE rates at 5% slack and monotone energies, {dt:?}");
}

#[test]
fn criterion_8_discrete_dissipativity() {
    const REL: f64 = 1e-9;
    let n = 25;
    for seed in 0..30u64 {
        let (runs, xs, fs, _) = catalog_runs(seed, 10, n);
        for run in &runs {
            if let Some(u) = &run.u {
                let e = energy_u(&run.traj, u, &xs, fs);
                assert_monotone(&e, REL, run.name);
            }
            if let Some(v) = &run.v {
                let e = energy_v(&run.traj, v, fs);
                assert_monotone(&e, REL, run.name);
            }
        }
    }
    println!("criterion 8 pass: U/V nonincreasing along all catalog runs, rel 1e-9");
}

#[test]
fn criterion_9_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut cases = 0usize;

    // involution: dualizing twice is the identity, bit for bit
    for _ in 0..250 {
        let n = rng.gen_range(1..=20);
        let h = random_h(&mut rng, n);
        assert_eq!(anti_transpose(&anti_transpose(&h)).rows, h.rows);
        cases += 1;
    }

    // momentum form and H-matrix form trace the same iterates
    for _ in 0..250 {
        let n = rng.gen_range(1..=10);
        let d = rng.gen_range(2..=6);
        let c = ThreeTermCoeffs::new(
            (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
            (0..n).map(|_| rng.gen_range(-0.2..0.5)).collect(),
        );
        let q = random_spd_quadratic(&mut rng, d);
        let x0 = random_vec(&mut rng, d, 1.0);
        let lip = q.lipschitz();
        let t1 = run_three_term(&c, &q, &x0, lip).unwrap();
        let t2 = run_fsfom(&three_term_to_h(&c), &q, &x0, lip).unwrap();
        for k in 0..=n {
            let diff = linalg::norm(&linalg::sub(&t1.points[k], &t2.points[k]));
            assert!(diff <= 1e-9, "runner mismatch at step {k}: {diff:e}");
        }
        cases += 1;
    }

    // dual of the recursion = anti-transpose of its matrix
    for _ in 0..250 {
        let n = rng.gen_range(1..=12);
        let c = ThreeTermCoeffs::new(
            (0..n).map(|_| rng.gen_range(0.05..1.5)).collect(),
            (0..n).map(|_| rng.gen_range(0.0..0.8)).collect(),
        );
        let lhs = three_term_to_h(&dual_three_term(&c).unwrap());
        let rhs = anti_transpose(&three_term_to_h(&c));
        assert!(lhs.max_rel_diff(&rhs) <= 1e-10);
        cases += 1;
    }

    // prox steps satisfy their optimality condition
    for _ in 0..150 {
        let d = rng.gen_range(2..=8);
        let mut a = linalg::Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let b = random_vec(&mut rng, d, 1.0);
        let prob = make_lasso(a, b, rng.gen_range(0.01..0.5));
        let y = random_vec(&mut rng, d, 2.0);
        let alpha = rng.gen_range(0.5..4.0);
        let res = prox_optimality_residual(&prob, &y, alpha);
        assert!(res <= 1e-10, "prox residual {res:e}");
        cases += 1;
    }

    // oracle gradients agree with finite differences
    for _ in 0..150 {
        let d = rng.gen_range(2..=6);
        let q = random_spd_quadratic(&mut rng, d);
        let x = random_vec(&mut rng, d, 1.0);
        let err = fd_gradient_error(&q, &x, 1e-6);
        assert!(err <= 1e-6, "fd error {err:e}");
        cases += 1;
    }

    // the stepping-stone sequences stay consistent too
    for n in 1..=50 {
        assert!(theta_sequence(n).recursion_residual() <= 1e-12);
        cases += 1;
    }

    assert!(cases >= 1000, "only {cases} cases");
    println!("criterion 9 pass: property suite, {cases} randomized cases");
}
