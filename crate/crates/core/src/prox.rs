//! Proximal maps used by the C-update.
//!
//! For a column segment `v`, per-entry weights `w` and a block weight `rho`,
//! [`sparse_group_prox`] returns the minimizer of
//!
//! ```text
//! ½‖x − v‖² + Σᵢ wᵢ|xᵢ| + rho‖x‖₂
//! ```
//!
//! which factors as block thresholding applied after entrywise soft
//! thresholding.

use crate::error::{Error, Result};

/// `sign(x) · max(|x| − rho, 0)`.
#[inline]
pub fn soft_threshold(x: f64, rho: f64) -> f64 {
    debug_assert!(rho >= 0.0);
    let mag = (x.abs() - rho).max(0.0);
    if x < 0.0 {
        -mag
    } else {
        mag
    }
}

/// `(x / ‖x‖₂) · max(0, ‖x‖₂ − rho)`, zero when `‖x‖₂ ≤ rho`.
pub fn block_threshold(x: &[f64], rho: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    block_threshold_in_place(&mut out, rho);
    out
}

pub fn block_threshold_in_place(x: &mut [f64], rho: f64) {
    debug_assert!(rho >= 0.0);
    if rho == 0.0 {
        return;
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = if norm > rho { (norm - rho) / norm } else { 0.0 };
    for v in x.iter_mut() {
        *v *= scale;
    }
}

/// `block_threshold(soft_threshold(v, w), rho)`.
pub fn sparse_group_prox(v: &[f64], w: &[f64], rho: f64) -> Result<Vec<f64>> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: v.len(),
            found: w.len(),
        });
    }
    let mut out = v.to_vec();
    sparse_group_prox_in_place(&mut out, w, rho);
    Ok(out)
}

/// In-place variant; `v` and `w` must have equal length.
pub fn sparse_group_prox_in_place(v: &mut [f64], w: &[f64], rho: f64) {
    debug_assert_eq!(v.len(), w.len());
    for (x, &t) in v.iter_mut().zip(w) {
        *x = soft_threshold(*x, t);
    }
    block_threshold_in_place(v, rho);
}
