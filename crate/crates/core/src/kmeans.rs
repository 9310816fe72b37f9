//! Seeded k-means with k-means++ initialization and restarts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 20;
pub const DEFAULT_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

/// Clusters the rows of `points` into `k` nonempty clusters. Deterministic
/// for a given seed.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_with(points, k, seed, DEFAULT_RESTARTS, DEFAULT_MAX_ITERS)
}

pub fn kmeans_with(
    points: &DMatrix<f64>,
    k: usize,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> Result<KMeansResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!(
            "k-means needs 1 <= k <= N, got k={k}, N={n}"
        )));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..restarts.max(1)).map(|_| seeder.random()).collect();
    let runs: Vec<KMeansResult> = seeds
        .par_iter()
        .map(|&s| single_run(points, k, s, max_iters))
        .collect();
    // Lowest inertia, earliest restart on ties.
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("at least one restart");
    Ok(best)
}

fn sq_dist(points: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    points
        .row(i)
        .iter()
        .zip(centroids.row(c).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn plus_plus_init(points: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = points.nrows();
    let mut centroids = DMatrix::zeros(k, points.ncols());
    let first = rng.random_range(0..n);
    centroids.set_row(0, &points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points, i, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.set_row(c, &points.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, i, &centroids, c));
        }
    }
    centroids
}

fn assign(points: &DMatrix<f64>, centroids: &DMatrix<f64>, labels: &mut [usize], dists: &mut [f64]) {
    for i in 0..points.nrows() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..centroids.nrows() {
            let d = sq_dist(points, i, centroids, c);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        labels[i] = best;
        dists[i] = best_d;
    }
}

/// Moves the point farthest from its centroid into each empty cluster,
/// never emptying a singleton donor.
fn repair_empty(labels: &mut [usize], dists: &mut [f64], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let donor = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
            .expect("k <= N guarantees a donor");
        labels[donor] = empty;
        dists[donor] = 0.0;
    }
}

fn update_centroids(points: &DMatrix<f64>, labels: &[usize], k: usize) -> DMatrix<f64> {
    let mut sums = DMatrix::zeros(k, points.ncols());
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        let mut row = sums.row_mut(l);
        row += points.row(i);
        counts[l] += 1;
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            let mut row = sums.row_mut(c);
            row /= count as f64;
        }
    }
    sums
}

fn single_run(points: &DMatrix<f64>, k: usize, seed: u64, max_iters: usize) -> KMeansResult {
    let n = points.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut labels = vec![usize::MAX; n];
    let mut next = vec![0usize; n];
    let mut dists = vec![0.0; n];
    for _ in 0..max_iters.max(1) {
        assign(points, &centroids, &mut next, &mut dists);
        repair_empty(&mut next, &mut dists, k);
        if next == labels {
            break;
        }
        labels.copy_from_slice(&next);
        centroids = update_centroids(points, &labels, k);
    }
    let inertia = (0..n).map(|i| sq_dist(points, i, &centroids, labels[i])).sum();
    KMeansResult {
        labels,
        centroids,
        inertia,
    }
}

/// Sum of squared distances of rows to their cluster means.
pub fn within_cluster_ss(points: &DMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let centroids = update_centroids(points, labels, k);
    (0..points.nrows())
        .map(|i| sq_dist(points, i, &centroids, labels[i]))
        .sum()
}
