use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdladder::clustering::{kmeans, kmeans_raw, resample_to_grid, train};
use rdladder::ingest::{builtin_paper_model, RDSample};
use rdladder::{BitrateGrid, Error, RDVector, ResolutionTier};

fn default_grid() -> BitrateGrid {
    BitrateGrid::linspace(0.2, 6.0, 10).unwrap()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Two labelings describe the same partition, ignoring label names.
fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    a.iter().zip(b).all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Centroids of the published 1080p curves plus uniform noise, 10 per cluster.
fn published_vectors(seed: u64, noise: f64) -> (Vec<RDVector>, Vec<usize>) {
    let model = builtin_paper_model();
    let grid = default_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::new();
    let mut truth = Vec::new();
    for c in 1..=6 {
        let cubic = model.cubic(c, ResolutionTier::P1080).unwrap();
        for g in 0..10 {
            let psnr = grid.points().iter().map(|&r| cubic.value(r) + rng.random_range(-noise..=noise)).collect();
            vectors.push(RDVector::new(format!("c{c}g{g}"), ResolutionTier::P1080, psnr, &grid).unwrap());
            truth.push(c);
        }
    }
    (vectors, truth)
}

#[test]
fn generating_partition_is_recovered() {
    for seed in 0..10 {
        let (vectors, truth) = published_vectors(100 + seed, 0.1);
        let result = kmeans(&vectors, 6, seed).unwrap();
        assert!(same_partition(&result.labels, &truth), "seed {seed}");
        assert!(result.converged);
    }
}

#[test]
fn too_few_vectors_or_mixed_tiers_are_rejected() {
    let (mut vectors, _) = published_vectors(1, 0.0);
    assert!(matches!(kmeans(&vectors[..3], 6, 0), Err(Error::InsufficientData { needed: 6, got: 3 })));
    vectors[0].tier = ResolutionTier::P720;
    assert!(kmeans(&vectors, 6, 0).is_err());
    assert!(kmeans(&vectors[1..], 0, 0).is_err());
}

#[test]
fn resampling_tracks_the_underlying_curve() {
    let model = builtin_paper_model();
    let cubic = model.cubic(2, ResolutionTier::P720).unwrap();
    let grid = default_grid();
    let xs: Vec<f64> = (0..20).map(|i| 0.17 + i as f64 * (6.03 - 0.17) / 19.0).collect();
    assert!(xs.iter().all(|x| grid.points().iter().all(|g| (x - g).abs() > 1e-3)));
    let samples: Vec<RDSample> = xs
        .iter()
        .map(|&r| RDSample::new("g", ResolutionTier::P720, r, cubic.value(r)).unwrap())
        .collect();
    let v = resample_to_grid(&samples, &grid).unwrap();
    let worst = grid.points().iter().zip(&v.psnr).map(|(&r, q)| (q - cubic.value(r)).abs()).fold(0.0, f64::max);
    assert!(worst < 0.05, "max deviation {worst}");
}

#[test]
fn resampling_refuses_to_extrapolate() {
    let samples: Vec<RDSample> = [0.5, 1.0, 6.0]
        .iter()
        .map(|&r| RDSample::new("g", ResolutionTier::P360, r, 30.0 + r).unwrap())
        .collect();
    assert!(matches!(resample_to_grid(&samples, &default_grid()), Err(Error::Coverage { .. })));
}

#[test]
fn noiseless_curves_train_back_to_their_coefficients() {
    let published = builtin_paper_model();
    let grid = default_grid();
    let (vectors, _) = published_vectors(0, 0.0);
    let trained = train(&BTreeMap::from([(ResolutionTier::P1080, vectors)]), &grid, 6, 42).unwrap();
    // Rank numbering by mean PSNR reproduces the published order at 1080p.
    for c in 1..=6 {
        let got = trained.model.cubic(c, ResolutionTier::P1080).unwrap().coeffs();
        let want = published.cubic(c, ResolutionTier::P1080).unwrap().coeffs();
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "cluster {c}: {got:?} vs {want:?}");
        }
    }
}

fn blobs() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, u64)> {
    (2usize..6, 3usize..8, any::<u64>()).prop_flat_map(|(k, per, seed)| {
        let n = k * per;
        (prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), n), Just(k), Just(seed), Just(per))
            .prop_map(|(jitter, k, seed, per)| {
                let data = jitter
                    .into_iter()
                    .enumerate()
                    .map(|(i, j)| {
                        let centre = 20.0 * (i / per) as f64;
                        j.into_iter().map(|x| centre + x).collect()
                    })
                    .collect();
                (data, k, seed)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lloyd_steps_never_increase_inertia(data in prop::collection::vec(prop::collection::vec(0.0..50.0f64, 4), 8..40), k in 1usize..6, seed: u64) {
        let rows: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
        let r = kmeans_raw(&rows, k, seed).unwrap();
        for w in r.inertia_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", r.inertia_history);
        }
        let total: f64 = rows.iter().zip(&r.labels).map(|(v, &l)| sq_dist(v, &r.centroids[l])).sum();
        prop_assert!((total - r.inertia).abs() <= 1e-9 * total.max(1.0));
        if r.converged {
            for (v, &l) in rows.iter().zip(&r.labels) {
                let own = sq_dist(v, &r.centroids[l]);
                for c in &r.centroids {
                    prop_assert!(own <= sq_dist(v, c) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_result(data in prop::collection::vec(prop::collection::vec(0.0..50.0f64, 4), 8..30), seed: u64) {
        let rows: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(kmeans_raw(&rows, 3, seed).unwrap(), kmeans_raw(&rows, 3, seed).unwrap());
    }

    #[test]
    fn separated_blobs_partition_ignores_input_order((data, k, seed) in blobs(), shuffle_seed: u64) {
        let rows: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
        let a = kmeans_raw(&rows, k, seed).unwrap();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let shuffled: Vec<&[f64]> = order.iter().map(|&i| rows[i]).collect();
        let b = kmeans_raw(&shuffled, k, seed).unwrap();
        let b_in_original_order: Vec<usize> = {
            let mut out = vec![0; rows.len()];
            for (pos, &i) in order.iter().enumerate() {
                out[i] = b.labels[pos];
            }
            out
        };
        prop_assert!(same_partition(&a.labels, &b_in_original_order));
    }
}
