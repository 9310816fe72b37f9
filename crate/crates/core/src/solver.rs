//! ADMM solver for the (weighted, group-regularized) self-expressive problem
//!
//! ```text
//! min_C  Σᵢⱼ Wᵢⱼ|Cᵢⱼ| + λ₂ Σⱼ Σ_{g∈G} ‖(C_{:j})_g‖₂ + μ/2 ‖X − XC‖²_F   s.t. diag(C) = 0
//! ```
//!
//! with `W = 1 + λ₁Θ`. Without side information this is plain SSC.
//!
//! The split introduces `Z` for the data term; each iteration solves
//! `(μXᵀX + βI) Z = μXᵀX + βC − Δ`, applies the composed prox column by
//! column and group by group to `Z + Δ/β` (the diagonal entry excluded from
//! its group), zeroes the diagonal, and takes a
//! dual ascent step `Δ ← Δ + β(Z − C)`.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{check_partition, CoefficientMatrix, SideInfo, SolverConfig};
use crate::error::{Error, Result};
use crate::prox::{soft_threshold, sparse_group_prox_in_place};

/// Off-diagonal Gram entries below this are treated as zero.
const GRAM_FLOOR: f64 = 1e-12;

/// μ = alpha / max_{i≠j} |x_iᵀ x_j|.
pub fn compute_mu(x: &DMatrix<f64>, alpha: f64) -> Result<f64> {
    if x.ncols() < 2 {
        return Err(Error::TooFewSamples(x.ncols()));
    }
    let gram = x.transpose() * x;
    let mut max = 0.0_f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            if i != j {
                max = max.max(gram[(i, j)].abs());
            }
        }
    }
    if max < GRAM_FLOOR {
        return Err(Error::DegenerateGram);
    }
    Ok(alpha / max)
}

/// The problem one ADMM run solves.
#[derive(Debug, Clone)]
pub struct GuidedProblem {
    pub x: DMatrix<f64>,
    pub theta: Option<DMatrix<f64>>,
    pub groups: Option<Vec<Vec<usize>>>,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
    pub beta: f64,
}

impl GuidedProblem {
    /// Plain SSC: unit weights, no group term.
    pub fn plain(x: DMatrix<f64>, mu: f64, beta: f64) -> Self {
        GuidedProblem {
            x,
            theta: None,
            groups: None,
            lambda1: 0.0,
            lambda2: 0.0,
            mu,
            beta,
        }
    }

    pub fn guided(
        x: DMatrix<f64>,
        side: &SideInfo,
        lambda1: f64,
        lambda2: f64,
        mu: f64,
        beta: f64,
    ) -> Self {
        GuidedProblem {
            x,
            theta: Some(side.theta().clone()),
            groups: Some(side.groups().to_vec()),
            lambda1,
            lambda2,
            mu,
            beta,
        }
    }

    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidConfig("mu must be positive".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig("beta must be positive".into()));
        }
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 {
            return Err(Error::InvalidConfig("lambdas must be nonnegative".into()));
        }
        if let Some(theta) = &self.theta {
            if theta.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "theta is {}x{}, expected {n}x{n}",
                    theta.nrows(),
                    theta.ncols()
                )));
            }
        }
        if let Some(groups) = &self.groups {
            check_partition(groups, n)?;
        }
        Ok(())
    }

    /// Objective at `c` (with Z = C): weighted ℓ1 + group term + data term.
    pub fn objective(&self, c: &DMatrix<f64>) -> f64 {
        let n = self.n();
        let mut l1 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let w = 1.0 + self.lambda1 * self.theta.as_ref().map_or(0.0, |t| t[(i, j)]);
                l1 += w * c[(i, j)].abs();
            }
        }
        let mut group = 0.0;
        if let Some(groups) = &self.groups {
            for j in 0..n {
                for g in groups {
                    group += g.iter().map(|&i| c[(i, j)].powi(2)).sum::<f64>().sqrt();
                }
            }
        }
        let resid = &self.x - &self.x * c;
        l1 + self.lambda2 * group + 0.5 * self.mu * resid.norm_squared()
    }
}

/// Reusable factorization of `μXᵀX + βI` for the Z-update.
pub struct ZSolver {
    scaled_gram: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    beta: f64,
}

impl ZSolver {
    pub fn new(x: &DMatrix<f64>, mu: f64, beta: f64) -> Result<Self> {
        let n = x.ncols();
        let scaled_gram = (x.transpose() * x) * mu;
        let system = &scaled_gram + DMatrix::<f64>::identity(n, n) * beta;
        let chol = Cholesky::new(system)
            .ok_or_else(|| Error::SolveFailure("system matrix is not positive definite".into()))?;
        Ok(ZSolver {
            scaled_gram,
            chol,
            beta,
        })
    }

    /// Solves `(μXᵀX + βI) Z = μXᵀX + βC − Δ`.
    pub fn solve(&self, c: &DMatrix<f64>, delta: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let rhs = &self.scaled_gram + c * self.beta - delta;
        let z = self.chol.solve(&rhs);
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolveFailure("non-finite Z".into()));
        }
        Ok(z)
    }
}

/// One-shot Z-update.
pub fn update_z(
    x: &DMatrix<f64>,
    c: &DMatrix<f64>,
    delta: &DMatrix<f64>,
    mu: f64,
    beta: f64,
) -> Result<DMatrix<f64>> {
    ZSolver::new(x, mu, beta)?.solve(c, delta)
}

/// C-update: per column and group, the composed prox of `Z + Δ/β` with
/// entry weights `(1 + λ₁Θ)/β` and block weight `λ₂/β`; then `J − diag(J)`.
///
/// Without `groups` the group term is absent and the update is a weighted
/// soft threshold.
pub fn update_c(
    z: &DMatrix<f64>,
    delta: &DMatrix<f64>,
    theta: Option<&DMatrix<f64>>,
    groups: Option<&[Vec<usize>]>,
    lambda1: f64,
    lambda2: f64,
    beta: f64,
) -> Result<CoefficientMatrix> {
    let n = z.nrows();
    if z.shape() != (n, n) || delta.shape() != (n, n) {
        return Err(Error::ShapeMismatch("Z and Delta must be NxN".into()));
    }
    if let Some(t) = theta {
        if t.shape() != (n, n) {
            return Err(Error::ShapeMismatch("theta must be NxN".into()));
        }
    }
    let inv_beta = 1.0 / beta;
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let v: Vec<f64> = (0..n)
                .map(|i| z[(i, j)] + delta[(i, j)] * inv_beta)
                .collect();
            let w: Vec<f64> = (0..n)
                .map(|i| (1.0 + lambda1 * theta.map_or(0.0, |t| t[(i, j)])) * inv_beta)
                .collect();
            let mut out = vec![0.0; n];
            match groups {
                Some(groups) => {
                    let rho = lambda2 * inv_beta;
                    let mut vg = Vec::new();
                    let mut wg = Vec::new();
                    for g in groups {
                        vg.clear();
                        wg.clear();
                        // C_jj is pinned to 0, so it must not enter the block norm.
                        let members = || g.iter().copied().filter(|&i| i != j);
                        vg.extend(members().map(|i| v[i]));
                        wg.extend(members().map(|i| w[i]));
                        sparse_group_prox_in_place(&mut vg, &wg, rho);
                        for (i, &x) in members().zip(&vg) {
                            out[i] = x;
                        }
                    }
                }
                None => {
                    for i in 0..n {
                        out[i] = soft_threshold(v[i], w[i]);
                    }
                }
            }
            out[j] = 0.0;
            out
        })
        .collect();
    let mut c = DMatrix::zeros(n, n);
    for (j, col) in columns.iter().enumerate() {
        c.column_mut(j).copy_from_slice(col);
    }
    CoefficientMatrix::new(c)
}

/// Snapshot of the ADMM iterates.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub c: CoefficientMatrix,
    pub z: DMatrix<f64>,
    pub delta: DMatrix<f64>,
    pub iteration: usize,
    /// ‖Z − C‖_F.
    pub primal_residual: f64,
}

/// Per-iteration residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_residual: f64,
    pub relative_residual: f64,
    /// β‖C^{k+1} − C^k‖_F; reported, not used for stopping.
    pub dual_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// Hit `max_iters` within 10× the tolerance.
    MaxIterations,
    /// Hit `max_iters` with the residual above 10× the tolerance.
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub state: AdmmState,
    pub history: Vec<IterationRecord>,
    pub status: SolveStatus,
}

impl SolveOutput {
    pub fn coefficients(&self) -> &CoefficientMatrix {
        &self.state.c
    }

    pub fn final_relative_residual(&self) -> f64 {
        self.history.last().map_or(0.0, |r| r.relative_residual)
    }

    /// Turns a `NotConverged` run into an error.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            SolveStatus::NotConverged => Err(Error::NotConverged {
                iterations: self.state.iteration,
                residual: self.final_relative_residual(),
            }),
            _ => Ok(self),
        }
    }
}

/// Runs ADMM from all-zero iterates until the relative primal residual
/// drops to `cfg.residual_tol` or `cfg.max_iters` is reached.
pub fn solve(problem: &GuidedProblem, cfg: &SolverConfig) -> Result<SolveOutput> {
    problem.validate()?;
    let n = problem.n();
    let beta = problem.beta;
    let zsolver = ZSolver::new(&problem.x, problem.mu, beta)?;
    let mut c = CoefficientMatrix::new(DMatrix::zeros(n, n))?;
    let mut z = DMatrix::zeros(n, n);
    let mut delta = DMatrix::zeros(n, n);
    let mut history = Vec::with_capacity(cfg.max_iters.min(1024));
    let mut status = SolveStatus::NotConverged;
    let mut primal = 0.0;

    for iteration in 1..=cfg.max_iters {
        z = zsolver.solve(c.values(), &delta)?;
        let next = update_c(
            &z,
            &delta,
            problem.theta.as_ref(),
            problem.groups.as_deref(),
            problem.lambda1,
            problem.lambda2,
            beta,
        )?;
        let diff = &z - next.values();
        delta += &diff * beta;
        primal = diff.norm();
        let relative = primal / next.values().norm().max(1.0);
        let dual = beta * (next.values() - c.values()).norm();
        c = next;
        history.push(IterationRecord {
            iteration,
            primal_residual: primal,
            relative_residual: relative,
            dual_residual: dual,
        });
        if relative <= cfg.residual_tol {
            status = SolveStatus::Converged;
            break;
        }
    }
    if status != SolveStatus::Converged {
        let last = history.last().map_or(f64::INFINITY, |r| r.relative_residual);
        status = if last <= 10.0 * cfg.residual_tol {
            SolveStatus::MaxIterations
        } else {
            SolveStatus::NotConverged
        };
        log::debug!("ADMM stopped at max_iters with relative residual {last:e}");
    }
    let iteration = history.len();
    Ok(SolveOutput {
        state: AdmmState {
            c,
            z,
            delta,
            iteration,
            primal_residual: primal,
        },
        history,
        status,
    })
}
