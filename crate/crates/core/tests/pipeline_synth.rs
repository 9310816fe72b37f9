//! End-to-end pipeline behaviour and synthetic galleries.

mod common;

use nalgebra::DMatrix;

use lgssc::data::{Guidance, SolverConfig};
use lgssc::pipeline::{run_lgssc, run_ssc_baseline};
use lgssc::synth::{corrupt_with_indices, corrupted_count, generate, CorruptionKind, CorruptionSpec, Fill, SubspaceSpec};

use common::*;

fn spec(seed: u64) -> SubspaceSpec {
    SubspaceSpec {
        ambient_dim: 36,
        subspace_dims: vec![3, 3, 3],
        points_per_subspace: 12,
        noise_sigma: 0.0,
        shared_basis: 0,
        seed,
    }
}

fn cfg() -> SolverConfig {
    SolverConfig {
        n_clusters: 3,
        ..SolverConfig::default()
    }
}

#[test]
fn generated_points_lie_on_their_subspaces() {
    let g = generate(&spec(5), 6, 6).unwrap();
    let labels = g.labels().unwrap();
    assert_eq!(labels.len(), 36);
    for k in 0..3 {
        let cols: Vec<usize> = (0..36).filter(|&j| labels[j] == k).collect();
        let block = g.data().select_columns(cols.iter());
        let (vals, _) = jacobi_eigen(&(block.transpose() * &block));
        // Rank 3: every eigenvalue past the third vanishes.
        assert!(vals[..cols.len() - 3].iter().all(|v| v.abs() < 1e-10), "{vals:?}");
        assert!(vals[cols.len() - 3] > 1e-3);
    }
    for col in g.data().column_iter() {
        assert!((col.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn generation_is_seeded() {
    assert_eq!(generate(&spec(1), 6, 6).unwrap().data(), generate(&spec(1), 6, 6).unwrap().data());
    assert_ne!(generate(&spec(1), 6, 6).unwrap().data(), generate(&spec(2), 6, 6).unwrap().data());
    assert!(generate(&spec(1), 5, 6).is_err());
    let mut bad = spec(1);
    bad.subspace_dims = vec![36];
    assert!(generate(&bad, 6, 6).is_err());
}

#[test]
fn occlusion_touches_only_the_block_of_chosen_samples() {
    let g = generate(&spec(3), 6, 6).unwrap();
    let c = CorruptionSpec::quadrant_occlusion_with(6, 6, 0.3, Fill::Constant(0.7), 9);
    let (out, chosen) = corrupt_with_indices(&g, &c).unwrap();
    assert_eq!(chosen.len(), corrupted_count(0.3, 36));
    assert_eq!(chosen.len(), 11);
    for j in 0..36 {
        let hit = chosen.contains(&j);
        let col = out.data().column(j);
        assert!((col.norm() - 1.0).abs() < 1e-12);
        if !hit {
            assert!((col - g.data().column(j)).amax() < 1e-15);
            continue;
        }
        // Top-left 3x3 block holds one constant value, the rest is a rescaled original.
        let block: Vec<usize> = (0..3).flat_map(|r| (0..3).map(move |c| r * 6 + c)).collect();
        let v0 = col[block[0]];
        assert!(block.iter().all(|&p| (col[p] - v0).abs() < 1e-15));
        let outside: Vec<usize> = (0..36).filter(|p| !block.contains(p)).collect();
        let ratio = col[outside[0]] / g.data()[(outside[0], j)];
        for &p in &outside {
            assert!((col[p] - ratio * g.data()[(p, j)]).abs() < 1e-12);
        }
        assert!((v0 - 0.7 * ratio).abs() < 1e-12);
    }
    assert_eq!(corrupt_with_indices(&g, &c).unwrap().1, chosen);
}

#[test]
fn shared_noise_pastes_the_same_texture() {
    let g = generate(&spec(4), 6, 6).unwrap();
    let c = CorruptionSpec::quadrant_occlusion_with(6, 6, 0.5, Fill::SharedNoise, 2);
    let (out, chosen) = corrupt_with_indices(&g, &c).unwrap();
    let (a, b) = (chosen[0], chosen[1]);
    // After renormalization the raw blocks differ only by each column's scale.
    let ra = out.data()[(0, a)] / out.data()[(1, a)];
    let rb = out.data()[(0, b)] / out.data()[(1, b)];
    assert!((ra - rb).abs() < 1e-9);
    let none = CorruptionSpec {
        kind: CorruptionKind::None,
        fraction_of_samples: 0.5,
        seed: 0,
    };
    assert!(corrupt_with_indices(&g, &none).unwrap().1.is_empty());
}

#[test]
fn single_level_equals_the_baseline() {
    let g = generate(&spec(6), 6, 6).unwrap();
    let one = SolverConfig { levels: 1, ..cfg() };
    let lg = run_lgssc(&g, &one).unwrap();
    let ssc = run_ssc_baseline(&g, &one).unwrap();
    assert_eq!(lg.labels, ssc.labels);
    let gap = (lg.root_coefficients().values() - ssc.coefficients.values()).amax();
    assert!(gap < 1e-10, "{gap:e}");
    assert_eq!(lg.diagnostics.len(), 1);
    assert!(lg.fused_root().is_none());
}

#[test]
fn neutral_guidance_without_group_term_reproduces_the_baseline() {
    let g = generate(&spec(7), 6, 6).unwrap();
    let neutral = SolverConfig {
        guidance: Guidance::Neutral,
        lambda2: 0.0,
        ..cfg()
    };
    let lg = run_lgssc(&g, &neutral).unwrap();
    let ssc = run_ssc_baseline(&g, &neutral).unwrap();
    let gap = (lg.root_coefficients().values() - ssc.coefficients.values()).amax();
    assert!(gap < 1e-12, "{gap:e}");
}

#[test]
fn clean_data_is_clustered_perfectly() {
    let g = generate(&spec(8), 6, 6).unwrap();
    let truth = g.labels().unwrap().to_vec();
    let lg = run_lgssc(&g, &cfg()).unwrap();
    let ssc = run_ssc_baseline(&g, &cfg()).unwrap();
    assert_eq!(accuracy_exhaustive(&lg.labels, &truth), 100.0);
    assert_eq!(accuracy_exhaustive(&ssc.labels, &truth), 100.0);
    assert!(min_same_subspace_mass(ssc.coefficients.values(), &truth) > 0.99);
}

#[test]
fn diagnostics_are_root_first_then_by_level() {
    let g = generate(&spec(9), 6, 6).unwrap();
    let out = run_lgssc(&g, &cfg()).unwrap();
    let d = &out.diagnostics;
    assert_eq!(d.len(), 1 + 4);
    assert_eq!((d[0].level, d[0].index), (1, 0));
    assert!(d[0].guided);
    for (k, node) in d[1..].iter().enumerate() {
        assert_eq!((node.level, node.index), (2, k));
        assert!(!node.guided);
        assert_eq!(node.patch_height * node.patch_width, 9);
        assert_eq!(node.labels.len(), 36);
    }
    assert!(out.fused_root().is_some());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let g = generate(&spec(10), 6, 6).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_lgssc(&g, &cfg()).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.labels, b.labels);
    assert_eq!(a.root_coefficients().values(), b.root_coefficients().values());
}

#[test]
fn degenerate_inputs_are_errors() {
    let g = generate(&spec(11), 6, 6).unwrap();
    let too_deep = SolverConfig { levels: 5, ..cfg() };
    assert!(run_lgssc(&g, &too_deep).is_err());
    let zero = lgssc::data::DataGallery::new(DMatrix::zeros(36, 3), 6, 6, None);
    assert!(zero.is_err() || run_ssc_baseline(&zero.unwrap(), &cfg()).is_err());
}
