//! Synthetic union-of-subspaces galleries and contiguous corruption.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{normalize_columns, DataGallery};
use crate::error::{Error, Result};
use crate::hierarchy::Rect;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    pub ambient_dim: usize,
    pub subspace_dims: Vec<usize>,
    pub points_per_subspace: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    /// Basis vectors shared by consecutive subspaces (0 = independent draws).
    #[serde(default)]
    pub shared_basis: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SubspaceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.subspace_dims.is_empty() {
            return Err(Error::InvalidConfig("at least one subspace is required".into()));
        }
        for &d in &self.subspace_dims {
            if d == 0 || d >= self.ambient_dim {
                return Err(Error::InvalidConfig(format!(
                    "subspace dimension {d} must lie in 1..{}",
                    self.ambient_dim
                )));
            }
            if self.points_per_subspace < d + 1 {
                return Err(Error::InvalidConfig(format!(
                    "{} points cannot span-and-overdetermine a {d}-dim subspace",
                    self.points_per_subspace
                )));
            }
            if self.shared_basis >= d {
                return Err(Error::InvalidConfig(
                    "shared basis must be smaller than every subspace dimension".into(),
                ));
            }
        }
        if self.noise_sigma.is_nan() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidConfig("noise sigma must be nonnegative".into()));
        }
        Ok(())
    }
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    let q = m.qr().q();
    q.columns(0, cols).clone_owned()
}

/// Random orthonormal bases, one per subspace.
pub fn random_bases(spec: &SubspaceSpec, rng: &mut ChaCha8Rng) -> Vec<DMatrix<f64>> {
    let dim = spec.ambient_dim;
    let mut bases: Vec<DMatrix<f64>> = Vec::with_capacity(spec.subspace_dims.len());
    for (i, &d) in spec.subspace_dims.iter().enumerate() {
        let fresh = gaussian(dim, d, rng);
        let basis = if i > 0 && spec.shared_basis > 0 {
            let prev = &bases[i - 1];
            let c = spec.shared_basis;
            let mut m = fresh;
            m.columns_mut(0, c).copy_from(&prev.columns(prev.ncols() - c, c));
            orthonormalize(m)
        } else {
            orthonormalize(fresh)
        };
        bases.push(basis);
    }
    bases
}

/// Points drawn from random subspaces, columns unit-normalized, labels by
/// subspace (samples grouped by subspace in column order).
pub fn generate(spec: &SubspaceSpec, height: usize, width: usize) -> Result<DataGallery> {
    spec.validate()?;
    if height * width != spec.ambient_dim {
        return Err(Error::DimensionMismatch {
            height,
            width,
            rows: spec.ambient_dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bases = random_bases(spec, &mut rng);
    let m = spec.points_per_subspace;
    let total = m * bases.len();
    let mut data = DMatrix::zeros(spec.ambient_dim, total);
    let mut labels = Vec::with_capacity(total);
    for (k, b) in bases.iter().enumerate() {
        let coeffs = gaussian(b.ncols(), m, &mut rng);
        let mut pts = b * coeffs;
        if spec.noise_sigma > 0.0 {
            pts += gaussian(spec.ambient_dim, m, &mut rng) * spec.noise_sigma;
        }
        data.columns_mut(k * m, m).copy_from(&pts);
        labels.extend(std::iter::repeat_n(k, m));
    }
    normalize_columns(DataGallery::new(data, height, width, Some(labels))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Fill {
    Constant(f64),
    /// Fresh uniform noise over the gallery's value range for every sample.
    UniformNoise,
    /// One uniform-noise texture over the gallery's value range, pasted
    /// into every corrupted sample (the same occluder on every image).
    SharedNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CorruptionKind {
    None,
    BlockOcclusion {
        top: usize,
        left: usize,
        height: usize,
        width: usize,
        fill: Fill,
    },
    IlluminationScale {
        min_gain: f64,
        max_gain: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub fraction_of_samples: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CorruptionSpec {
    /// Noise-filled occlusion of the top-left quadrant.
    pub fn quadrant_occlusion(height: usize, width: usize, fraction: f64, seed: u64) -> Self {
        Self::quadrant_occlusion_with(height, width, fraction, Fill::UniformNoise, seed)
    }

    pub fn quadrant_occlusion_with(
        height: usize,
        width: usize,
        fraction: f64,
        fill: Fill,
        seed: u64,
    ) -> Self {
        CorruptionSpec {
            kind: CorruptionKind::BlockOcclusion {
                top: 0,
                left: 0,
                height: height.div_ceil(2),
                width: width.div_ceil(2),
                fill,
            },
            fraction_of_samples: fraction,
            seed,
        }
    }
}

/// Number of corrupted columns: ⌈fraction · N⌉.
pub fn corrupted_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64) - 1e-9).ceil().max(0.0) as usize
}

/// Corrupts a seeded random subset of columns, then renormalizes. Returns
/// the corrupted gallery and the sorted indices of corrupted columns.
pub fn corrupt_with_indices(g: &DataGallery, spec: &CorruptionSpec) -> Result<(DataGallery, Vec<usize>)> {
    if !(0.0..=1.0).contains(&spec.fraction_of_samples) {
        return Err(Error::InvalidConfig("fraction_of_samples must lie in [0, 1]".into()));
    }
    let n = g.len();
    if matches!(spec.kind, CorruptionKind::None) || spec.fraction_of_samples == 0.0 {
        return Ok((g.clone(), Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let count = corrupted_count(spec.fraction_of_samples, n).min(n);
    let mut chosen = sample(&mut rng, n, count).into_vec();
    chosen.sort_unstable();

    let (lo, hi) = g
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut data = g.data().clone();
    match &spec.kind {
        CorruptionKind::None => unreachable!(),
        CorruptionKind::BlockOcclusion {
            top,
            left,
            height,
            width,
            fill,
        } => {
            if *height == 0 || *width == 0 || top + height > g.height() || left + width > g.width() {
                return Err(Error::InvalidConfig("occlusion block outside the image".into()));
            }
            let rect = Rect {
                top: *top,
                left: *left,
                height: *height,
                width: *width,
            };
            let pixels = rect.pixel_indices(g.width());
            let mut draw = || if hi > lo { rng.random_range(lo..hi) } else { lo };
            let texture: Vec<f64> = match fill {
                Fill::SharedNoise => pixels.iter().map(|_| draw()).collect(),
                _ => Vec::new(),
            };
            for &j in &chosen {
                for (k, &p) in pixels.iter().enumerate() {
                    data[(p, j)] = match fill {
                        Fill::Constant(v) => *v,
                        Fill::UniformNoise => draw(),
                        Fill::SharedNoise => texture[k],
                    };
                }
            }
        }
        CorruptionKind::IlluminationScale { min_gain, max_gain } => {
            if !(0.0 < *min_gain && min_gain <= max_gain) {
                return Err(Error::InvalidConfig("gain range must satisfy 0 < min <= max".into()));
            }
            for &j in &chosen {
                let gain = if max_gain > min_gain {
                    rng.random_range(*min_gain..*max_gain)
                } else {
                    *min_gain
                };
                let mut col = data.column_mut(j);
                col *= gain;
            }
        }
    }
    let out = DataGallery::new(data, g.height(), g.width(), g.labels().map(<[usize]>::to_vec))?;
    Ok((normalize_columns(out)?, chosen))
}

pub fn corrupt(g: &DataGallery, spec: &CorruptionSpec) -> Result<DataGallery> {
    corrupt_with_indices(g, spec).map(|(g, _)| g)
}
