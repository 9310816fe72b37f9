//! ADMM solver against independent references.

mod common;

use nalgebra::DMatrix;
use rand::Rng;

use lgssc::data::SideInfo;
use lgssc::solver::{compute_mu, solve, GuidedProblem, SolveStatus, ZSolver};
use lgssc::{Error, SolverConfig};

use common::*;

fn tight() -> SolverConfig {
    SolverConfig {
        residual_tol: 1e-12,
        max_iters: 20_000,
        ..SolverConfig::default()
    }
}

/// Coordinate descent for `min ‖c‖₁ + μ/2‖b − Ac‖²` (unit-norm columns).
#[allow(clippy::needless_range_loop)]
fn lasso_cd(a: &DMatrix<f64>, b: &[f64], mu: f64) -> Vec<f64> {
    let m = a.ncols();
    let mut c = vec![0.0; m];
    let mut r: Vec<f64> = b.to_vec();
    for _ in 0..100_000 {
        let mut moved = 0.0_f64;
        for k in 0..m {
            let col = a.column(k);
            let sq: f64 = col.iter().map(|v| v * v).sum();
            let rho: f64 = col.iter().zip(&r).map(|(x, y)| x * y).sum::<f64>() + sq * c[k];
            let t = 1.0 / mu;
            let new = if rho > t {
                (rho - t) / sq
            } else if rho < -t {
                (rho + t) / sq
            } else {
                0.0
            };
            let d = new - c[k];
            if d != 0.0 {
                for (ri, x) in r.iter_mut().zip(col.iter()) {
                    *ri -= d * x;
                }
                c[k] = new;
                moved = moved.max(d.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    c
}

fn lasso_cd_ssc(x: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    let n = x.ncols();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let a = x.select_columns(keep.iter());
        let b: Vec<f64> = x.column(j).iter().copied().collect();
        for (k, v) in lasso_cd(&a, &b, mu).into_iter().enumerate() {
            out[(keep[k], j)] = v;
        }
    }
    out
}

#[test]
fn plain_solve_matches_coordinate_descent() {
    for seed in 0..10 {
        let x = random_unit_columns(15, 10, seed);
        let mu = compute_mu(&x, 20.0).unwrap();
        let out = solve(&GuidedProblem::plain(x.clone(), mu, mu), &tight()).unwrap();
        let cd = lasso_cd_ssc(&x, mu);
        let gap = (out.coefficients().values() - &cd).amax();
        assert!(gap < 1e-7, "seed {seed}: gap {gap:e}");
    }
}

#[test]
fn both_oracles_agree() {
    let x = random_unit_columns(20, 12, 77);
    let mu = compute_mu(&x, 20.0).unwrap();
    let gap = (lasso_cd_ssc(&x, mu) - lasso_ssc_oracle(&x, mu)).amax();
    assert!(gap < 1e-9, "{gap:e}");
}

#[test]
fn constant_theta_rescales_the_data_weight() {
    // (1 + λ₁t)‖C‖₁ + μ/2‖X − XC‖²  ≡  ‖C‖₁ + μ/(2(1 + λ₁t))‖X − XC‖².
    for (seed, t) in [(1u64, 0.5), (2, 1.0), (3, 2.0)] {
        let x = random_unit_columns(20, 12, seed);
        let mu = compute_mu(&x, 20.0).unwrap();
        let lambda1 = 1.5;
        let side = SideInfo::new(DMatrix::from_element(12, 12, t), (0..12).map(|i| vec![i]).collect()).unwrap();
        let problem = GuidedProblem::guided(x.clone(), &side, lambda1, 0.0, mu, mu);
        let got = solve(&problem, &tight()).unwrap();
        let want = lasso_ssc_oracle(&x, mu / (1.0 + lambda1 * t));
        let gap = (got.coefficients().values() - want).amax();
        assert!(gap < 1e-6, "t={t}: {gap:e}");
    }
}

#[test]
fn group_solution_satisfies_kkt() {
    // Whole-column group, Θ = 0: per column j, with g(c) = μAᵀ(b − Ac),
    //   c ≠ 0:  gᵢ − λ₂cᵢ/‖c‖ ∈ ∂|cᵢ|.
    let x = random_unit_columns(20, 12, 9);
    let mu = compute_mu(&x, 20.0).unwrap();
    let lambda2 = 0.3;
    let side = SideInfo::new(DMatrix::zeros(12, 12), vec![(0..12).collect()]).unwrap();
    let problem = GuidedProblem::guided(x.clone(), &side, 1.0, lambda2, mu, mu);
    let out = solve(&problem, &tight()).unwrap();
    assert_eq!(out.status, SolveStatus::Converged);
    let c = out.coefficients().values();
    for j in 0..12 {
        let col = c.column(j);
        let norm = col.norm();
        assert!(norm > 0.0);
        let resid = x.column(j) - &x * col;
        for i in (0..12).filter(|&i| i != j) {
            let g = mu * x.column(i).dot(&resid) - lambda2 * c[(i, j)] / norm;
            if c[(i, j)] != 0.0 {
                assert!((g - c[(i, j)].signum()).abs() < 1e-5, "({i},{j}) {g}");
            } else {
                assert!(g.abs() <= 1.0 + 1e-5, "({i},{j}) {g}");
            }
        }
    }
}

#[test]
fn objective_at_solution_beats_perturbations() {
    let x = random_unit_columns(20, 12, 4);
    let mu = compute_mu(&x, 20.0).unwrap();
    let mut r = rng(4);
    let mut theta = DMatrix::zeros(12, 12);
    for i in 0..12 {
        for j in i + 1..12 {
            let v = r.random_range(0.0..2.0);
            theta[(i, j)] = v;
            theta[(j, i)] = v;
        }
    }
    let side = SideInfo::new(theta, vec![(0..6).collect(), (6..12).collect()]).unwrap();
    let problem = GuidedProblem::guided(x, &side, 1.0, 0.5, mu, mu);
    let c = solve(&problem, &tight()).unwrap().coefficients().values().clone();
    let f0 = problem.objective(&c);
    for _ in 0..200 {
        let mut p = c.clone();
        let (i, j) = (r.random_range(0..12), r.random_range(0..12));
        if i == j {
            continue;
        }
        p[(i, j)] += r.random_range(-1e-3..1e-3);
        assert!(problem.objective(&p) >= f0 - 1e-9);
    }
}

#[test]
fn z_update_solves_its_linear_system() {
    let x = random_unit_columns(8, 6, 2);
    let (mu, beta) = (3.0, 1.7);
    let mut r = rng(2);
    let c = DMatrix::from_fn(6, 6, |i, j| if i == j { 0.0 } else { r.random_range(-1.0..1.0) });
    let delta = DMatrix::from_fn(6, 6, |_, _| r.random_range(-1.0..1.0));
    let z = ZSolver::new(&x, mu, beta).unwrap().solve(&c, &delta).unwrap();
    let g = x.transpose() * &x;
    let lhs = (&g * mu + DMatrix::<f64>::identity(6, 6) * beta) * &z;
    let rhs = &g * mu + &c * beta - &delta;
    assert!((lhs - rhs).amax() < 1e-10);
}

#[test]
fn residual_history_is_recorded() {
    let x = random_unit_columns(20, 12, 5);
    let mu = compute_mu(&x, 20.0).unwrap();
    let out = solve(&GuidedProblem::plain(x, mu, mu), &SolverConfig::default()).unwrap();
    assert_eq!(out.history.len(), out.state.iteration);
    assert!(out.final_relative_residual() <= 1e-6);
    let last = out.history.last().unwrap();
    let c_norm = out.coefficients().values().norm().max(1.0);
    assert!((last.relative_residual - last.primal_residual / c_norm).abs() < 1e-15);
}

#[test]
fn max_iters_is_flagged() {
    let x = random_unit_columns(20, 12, 6);
    let mu = compute_mu(&x, 20.0).unwrap();
    let cfg = SolverConfig {
        max_iters: 3,
        ..SolverConfig::default()
    };
    let out = solve(&GuidedProblem::plain(x, mu, mu), &cfg).unwrap();
    assert_eq!(out.state.iteration, 3);
    assert_ne!(out.status, SolveStatus::Converged);
    assert!(matches!(out.into_result(), Err(Error::NotConverged { iterations: 3, .. })));
}

#[test]
fn invalid_side_info_is_rejected() {
    let x = random_unit_columns(6, 4, 1);
    let bad_groups = GuidedProblem {
        x: x.clone(),
        theta: None,
        groups: Some(vec![vec![0, 1], vec![1, 2, 3]]),
        lambda1: 1.0,
        lambda2: 1.0,
        mu: 1.0,
        beta: 1.0,
    };
    assert!(solve(&bad_groups, &SolverConfig::default()).is_err());
    let bad_theta = GuidedProblem {
        theta: Some(DMatrix::zeros(3, 3)),
        groups: None,
        ..bad_groups
    };
    assert!(matches!(solve(&bad_theta, &SolverConfig::default()), Err(Error::ShapeMismatch(_))));
}
