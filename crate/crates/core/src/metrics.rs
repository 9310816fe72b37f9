//! Clustering quality on a 0–100 scale: accuracy under the best label
//! bijection, normalized mutual information (geometric-mean normalizer) and
//! the Hubert–Arabie adjusted Rand index.

use crate::error::{Error, Result};

/// The NMI normalizer used by [`nmi`], recorded in emitted metadata.
pub const NMI_NORMALIZATION: &str = "sqrt";

/// Counts of (pred, truth) label pairs after compacting both label sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `counts[a][b]`: samples with the a-th predicted and b-th true label.
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut uniq: Vec<usize> = labels.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let mapped = labels
        .iter()
        .map(|l| uniq.binary_search(l).expect("present"))
        .collect();
    (mapped, uniq.len())
}

impl ContingencyTable {
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                expected: truth.len(),
                found: pred.len(),
            });
        }
        let (p, kp) = compact(pred);
        let (t, kt) = compact(truth);
        let mut counts = vec![vec![0u64; kt]; kp];
        for (&a, &b) in p.iter().zip(&t) {
            counts[a][b] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..kt).map(|b| counts.iter().map(|r| r[b]).sum()).collect();
        Ok(ContingencyTable {
            counts,
            row_sums,
            col_sums,
            total: pred.len() as u64,
        })
    }
}

/// Maximum-weight assignment on a rectangular matrix; returns the total
/// weight. Kuhn–Munkres with potentials on the square padding.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> f64 {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    if n == 0 {
        return 0.0;
    }
    let max_w = weights
        .iter()
        .flatten()
        .fold(0.0_f64, |m, &w| m.max(w));
    // Cost matrix (1-based, padded entries cost max_w i.e. weight 0).
    let cost = |i: usize, j: usize| -> f64 {
        let w = if i <= rows && j <= cols {
            weights[i - 1][j - 1]
        } else {
            0.0
        };
        max_w - w
    };
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n)
        .filter(|&j| matched[j] <= rows && j <= cols && matched[j] >= 1)
        .map(|j| weights[matched[j] - 1][j - 1])
        .sum()
}

/// Percentage of samples correctly labeled under the best bijection
/// between predicted and true labels.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    if table.total == 0 {
        return Err(Error::LengthMismatch {
            expected: 1,
            found: 0,
        });
    }
    let weights: Vec<Vec<f64>> = table
        .counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64).collect())
        .collect();
    let matched = max_weight_assignment(&weights).round();
    Ok(100.0 * matched / table.total as f64)
}

fn entropy(marginal: &[u64], total: f64) -> f64 {
    marginal
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// `I(pred; truth) / sqrt(H(pred) H(truth)) × 100`. When either entropy is
/// zero the result is 100 for identical partitions and 0 otherwise.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let total = table.total as f64;
    let hp = entropy(&table.row_sums, total);
    let ht = entropy(&table.col_sums, total);
    if hp == 0.0 || ht == 0.0 {
        return Ok(if same_partition(&table) { 100.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for (a, row) in table.counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if c > 0 {
                let nij = c as f64;
                mi += nij / total
                    * (nij * total / (table.row_sums[a] as f64 * table.col_sums[b] as f64)).ln();
            }
        }
    }
    Ok((100.0 * mi / (hp * ht).sqrt()).clamp(0.0, 100.0))
}

/// Identical up to relabeling: every row and column of the table has a
/// single nonzero cell.
fn same_partition(table: &ContingencyTable) -> bool {
    table.counts.len() == table.col_sums.len()
        && table
            .counts
            .iter()
            .all(|r| r.iter().filter(|&&c| c > 0).count() == 1)
        && (0..table.col_sums.len())
            .all(|b| table.counts.iter().filter(|r| r[b] > 0).count() == 1)
}

fn choose2(x: u64) -> f64 {
    (x as f64) * (x.saturating_sub(1) as f64) / 2.0
}

/// Adjusted Rand index × 100. A zero denominator yields 100 for identical
/// partitions and 0 otherwise.
pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    let sum_ij: f64 = table.counts.iter().flatten().map(|&c| choose2(c)).sum();
    let sum_a: f64 = table.row_sums.iter().map(|&c| choose2(c)).sum();
    let sum_b: f64 = table.col_sums.iter().map(|&c| choose2(c)).sum();
    let pairs = choose2(table.total);
    let expected = if pairs > 0.0 { sum_a * sum_b / pairs } else { 0.0 };
    let denom = 0.5 * (sum_a + sum_b) - expected;
    if denom == 0.0 {
        return Ok(if same_partition(&table) { 100.0 } else { 0.0 });
    }
    Ok(100.0 * (sum_ij - expected) / denom)
}

/// ACC, NMI and ARI together.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Scores {
    pub acc: f64,
    pub nmi: f64,
    pub ari: f64,
}

pub fn score(pred: &[usize], truth: &[usize]) -> Result<Scores> {
    Ok(Scores {
        acc: accuracy(pred, truth)?,
        nmi: nmi(pred, truth)?,
        ari: ari(pred, truth)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_permuted() {
        let t = [0, 0, 1, 1, 2, 2];
        let p = [2, 2, 0, 0, 1, 1];
        for pred in [&t, &p] {
            assert_eq!(accuracy(pred, &t).unwrap(), 100.0);
            assert!((nmi(pred, &t).unwrap() - 100.0).abs() < 1e-12);
            assert!((ari(pred, &t).unwrap() - 100.0).abs() < 1e-12);
        }
    }

    #[test]
    fn accuracy_small_case() {
        // Best bijection: {0→0, 2→1} (or 1→1) matches 2 + 2 = 4 of 6.
        let acc = accuracy(&[0, 0, 1, 1, 2, 2], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((acc - 400.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn constant_prediction() {
        let t = [0, 1, 0, 1];
        assert_eq!(nmi(&[3, 3, 3, 3], &t).unwrap(), 0.0);
        assert_eq!(ari(&[0, 0, 0, 0], &[1, 1, 1, 1]).unwrap(), 100.0);
        assert_eq!(nmi(&[0, 0, 0, 0], &[1, 1, 1, 1]).unwrap(), 100.0);
    }

    #[test]
    fn ari_pair_count() {
        // Pairs: no pair is together in both; a=2, b=2, pairs=6, E=4/6.
        let expect = 100.0 * (0.0 - 4.0 / 6.0) / (2.0 - 4.0 / 6.0);
        assert!((ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(accuracy(&[0], &[0, 1]), Err(Error::LengthMismatch { .. })));
        assert!(nmi(&[0], &[0, 1]).is_err());
        assert!(ari(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn rectangular_assignment() {
        let w = vec![vec![1.0, 5.0, 3.0], vec![4.0, 2.0, 0.0]];
        assert_eq!(max_weight_assignment(&w), 9.0);
        let wt = vec![vec![1.0, 4.0], vec![5.0, 2.0], vec![3.0, 0.0]];
        assert_eq!(max_weight_assignment(&wt), 9.0);
    }
}
