//! Reference implementations used as test oracles. None of these call into
//! the library's numerical code.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit_columns(d: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let mut x = DMatrix::from_fn(d, n, |_, _| r.random_range(-1.0..1.0));
    for mut c in x.column_iter_mut() {
        let norm = c.norm();
        c /= norm;
    }
    x
}

// ── prox ────────────────────────────────────────────────────────────────

/// `½‖x−v‖² + Σ wᵢ|xᵢ| + ρ‖x‖₂`.
pub fn prox_objective(x: &[f64], v: &[f64], w: &[f64], rho: f64) -> f64 {
    let mut quad = 0.0;
    let mut l1 = 0.0;
    let mut sq = 0.0;
    for i in 0..x.len() {
        quad += 0.5 * (x[i] - v[i]).powi(2);
        l1 += w[i] * x[i].abs();
        sq += x[i] * x[i];
    }
    quad + l1 + rho * sq.sqrt()
}

/// Numerical minimizer of [`prox_objective`] by Douglas–Rachford splitting
/// of `f = ½‖x−v‖² + Σwᵢ|xᵢ|` and `g = ρ‖x‖₂`, each prox written out
/// from its own optimality conditions.
pub fn prox_oracle(v: &[f64], w: &[f64], rho: f64) -> Vec<f64> {
    let n = v.len();
    let t = 1.0;
    let prox_f = |z: &[f64]| -> Vec<f64> {
        // argmin ½‖x−v‖² + Σw|x| + 1/(2t)‖x−z‖²  ⇒  coordinatewise shrink.
        (0..n)
            .map(|i| {
                let a = (v[i] + z[i] / t) / (1.0 + 1.0 / t);
                let k = w[i] / (1.0 + 1.0 / t);
                if a > k {
                    a - k
                } else if a < -k {
                    a + k
                } else {
                    0.0
                }
            })
            .collect()
    };
    let prox_g = |z: &[f64]| -> Vec<f64> {
        let norm = z.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm <= t * rho {
            vec![0.0; n]
        } else {
            z.iter().map(|a| a * (1.0 - t * rho / norm)).collect()
        }
    };
    let mut z = v.to_vec();
    let mut x = prox_f(&z);
    for _ in 0..100_000 {
        x = prox_f(&z);
        let refl: Vec<f64> = (0..n).map(|i| 2.0 * x[i] - z[i]).collect();
        let y = prox_g(&refl);
        let mut step = 0.0_f64;
        for i in 0..n {
            let dz = y[i] - x[i];
            z[i] += dz;
            step = step.max(dz.abs());
        }
        if step < 1e-14 {
            break;
        }
    }
    x
}

// ── lasso ───────────────────────────────────────────────────────────────

/// Plain SSC by an independent route: for each column j, delete x_j from
/// the dictionary and solve `min ‖c‖₁ + μ/2‖x_j − X₋ⱼc‖²` with a scaled
/// ADMM on the split c = z (explicit inverse, no diagonal masking).
pub fn lasso_ssc_oracle(x: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    let n = x.ncols();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != j).collect();
        let a = x.select_columns(keep.iter());
        let b = x.column(j).clone_owned();
        let rho = mu;
        let m = keep.len();
        let lhs = a.transpose() * &a * mu + DMatrix::<f64>::identity(m, m) * rho;
        let inv = lhs.try_inverse().expect("positive definite");
        let atb = a.transpose() * &b * mu;
        let mut z = DVector::<f64>::zeros(m);
        let mut u = DVector::<f64>::zeros(m);
        for _ in 0..200_000 {
            let c = &inv * (&atb + (&z - &u) * rho);
            let z_prev = z.clone();
            z = (&c + &u).map(|v| {
                let k = 1.0 / rho;
                if v > k {
                    v - k
                } else if v < -k {
                    v + k
                } else {
                    0.0
                }
            });
            u += &c - &z;
            let primal = (&c - &z).amax();
            let dual = (&z - &z_prev).amax() * rho;
            if primal < 1e-13 && dual < 1e-13 {
                break;
            }
        }
        for (k, &i) in keep.iter().enumerate() {
            out[(i, j)] = z[k];
        }
    }
    out
}

// ── eigen ───────────────────────────────────────────────────────────────

/// Cyclic Jacobi eigendecomposition of a symmetric matrix, ascending.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + a.norm()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = v.select_columns(order.iter());
    (values, vectors)
}

/// Sine of the largest principal angle between the column spans of two
/// orthonormal bases: ‖(I − PPᵀ)Q‖₂.
pub fn max_principal_sine(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let r = q - p * (p.transpose() * q);
    let (vals, _) = jacobi_eigen(&(r.transpose() * &r));
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `L = I − D^{-1/2} A D^{-1/2}` written out entrywise.
pub fn laplacian_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let deg: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).sum()).collect();
    DMatrix::from_fn(n, n, |i, j| {
        let s = if deg[i] > 0.0 && deg[j] > 0.0 {
            a[(i, j)] / (deg[i] * deg[j]).sqrt()
        } else {
            0.0
        };
        if i == j {
            1.0 - s
        } else {
            -s
        }
    })
}

// ── metrics ─────────────────────────────────────────────────────────────

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Accuracy (%) by trying every injective relabeling of the predicted
/// labels onto the true labels (with spare "unmatched" targets).
pub fn accuracy_exhaustive(pred: &[usize], truth: &[usize]) -> f64 {
    let kp = pred.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let slots = kp.max(kt);
    let targets: Vec<usize> = (0..slots).collect();
    let mut best = 0;
    for perm in permutations(&targets) {
        let hits = pred
            .iter()
            .zip(truth)
            .filter(|(&p, &t)| perm[p] == t)
            .count();
        best = best.max(hits);
    }
    100.0 * best as f64 / pred.len() as f64
}

/// ARI (%) from explicit enumeration of all sample pairs, in exact
/// integer arithmetic until the final division.
pub fn ari_pairs(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len();
    let (mut a, mut b, mut c, mut d) = (0i128, 0i128, 0i128, 0i128);
    for i in 0..n {
        for j in i + 1..n {
            match (pred[i] == pred[j], truth[i] == truth[j]) {
                (true, true) => a += 1,
                (true, false) => b += 1,
                (false, true) => c += 1,
                (false, false) => d += 1,
            }
        }
    }
    // ARI = 2(ad − bc) / ((a+b)(b+d) + (a+c)(c+d))
    let num = 2 * (a * d - b * c);
    let den = (a + b) * (b + d) + (a + c) * (c + d);
    if den == 0 {
        return 100.0;
    }
    100.0 * num as f64 / den as f64
}

/// NMI (%) with the geometric-mean normalizer, coded from joint
/// probabilities in base-2 logarithms.
pub fn nmi_second(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len() as f64;
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut cp: HashMap<usize, u64> = HashMap::new();
    let mut ct: HashMap<usize, u64> = HashMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *joint.entry((p, t)).or_default() += 1;
        *cp.entry(p).or_default() += 1;
        *ct.entry(t).or_default() += 1;
    }
    let h = |m: &HashMap<usize, u64>| -> f64 {
        -m.values()
            .map(|&c| {
                let p = c as f64 / n;
                p * p.log2()
            })
            .sum::<f64>()
    };
    if cp.len() == 1 || ct.len() == 1 {
        return if cp.len() == ct.len() { 100.0 } else { 0.0 };
    }
    let (hp, ht) = (h(&cp), h(&ct));
    let mut mi = 0.0;
    for (&(p, t), &c) in &joint {
        let pj = c as f64 / n;
        mi += pj * (pj * n * n / (cp[&p] as f64 * ct[&t] as f64)).log2();
    }
    100.0 * mi / (hp * ht).sqrt()
}

pub fn random_labels(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| r.random_range(0..k)).collect()
}

// ── misc ────────────────────────────────────────────────────────────────

pub fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Fraction of column j's ℓ1 mass on same-label rows, minimized over j.
pub fn min_same_subspace_mass(c: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let n = c.ncols();
    (0..n)
        .map(|j| {
            let total: f64 = (0..n).map(|i| c[(i, j)].abs()).sum();
            let same: f64 = (0..n).filter(|&i| labels[i] == labels[j]).map(|i| c[(i, j)].abs()).sum();
            if total == 0.0 {
                0.0
            } else {
                same / total
            }
        })
        .fold(1.0, f64::min)
}
