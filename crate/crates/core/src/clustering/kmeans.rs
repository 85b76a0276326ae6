//! Lloyd's K-means with k-means++ seeding over PSNR vectors.
//!
//! Deterministic for a fixed `(inputs, seed)`: the RNG is ChaCha8 seeded from
//! the caller's seed, iteration order is fixed, and distance ties go to the
//! lower centroid index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RDVector;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 300;
/// Convergence threshold on the largest centroid displacement, in dB.
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// 0-based centroid index per input vector.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances from each vector to its assigned centroid.
    pub inertia: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Inertia after every assignment step, including the final one.
    pub inertia_history: Vec<f64>,
}

/// Clusters vectors of one resolution tier.
pub fn kmeans(vectors: &[RDVector], k: usize, seed: u64) -> Result<KMeansResult> {
    if let Some(first) = vectors.first() {
        if let Some(v) = vectors.iter().find(|v| v.tier != first.tier) {
            return Err(Error::input(format!(
                "kmeans input mixes tiers {} and {}",
                first.tier, v.tier
            )));
        }
    }
    let data: Vec<&[f64]> = vectors.iter().map(|v| v.psnr.as_slice()).collect();
    kmeans_raw(&data, k, seed)
}

/// K-means over plain feature vectors.
pub fn kmeans_raw(data: &[&[f64]], k: usize, seed: u64) -> Result<KMeansResult> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if data.len() < k {
        return Err(Error::InsufficientData { needed: k, got: data.len() });
    }
    let dim = data[0].len();
    if dim == 0 || data.iter().any(|v| v.len() != dim) {
        return Err(Error::input("kmeans vectors must share one non-zero length"));
    }
    if data.iter().flat_map(|v| v.iter()).any(|x| !x.is_finite()) {
        return Err(Error::input("kmeans vectors must be finite"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(data, k, &mut rng);
    let mut labels = vec![0; data.len()];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut inertia = assign(data, &centroids, &mut labels);
        inertia = reseed_empty(data, &mut centroids, &mut labels, inertia);
        history.push(inertia);

        let updated = means(data, &labels, &centroids);
        let shift = centroids
            .iter()
            .zip(&updated)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        if shift < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }

    // Final assignment so every label is the nearest centroid.
    let inertia = assign(data, &centroids, &mut labels);
    history.push(inertia);

    Ok(KMeansResult {
        labels,
        centroids,
        inertia,
        iterations,
        converged,
        inertia_history: history,
    })
}

fn seed_plus_plus(data: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(data[rng.random_range(0..data.len())].to_vec());
    let mut nearest: Vec<f64> = data.iter().map(|v| squared_distance(v, &centroids[0])).collect();

    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    chosen = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            chosen.expect("positive total implies a positive weight")
        } else {
            // Every point coincides with a centroid; empty clusters get
            // re-seeded during iteration.
            rng.random_range(0..data.len())
        };
        let c = data[pick].to_vec();
        for (n, v) in nearest.iter_mut().zip(data) {
            *n = n.min(squared_distance(v, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Nearest-centroid assignment; returns the inertia.
fn assign(data: &[&[f64]], centroids: &[Vec<f64>], labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (v, label) in data.iter().zip(labels.iter_mut()) {
        let (best, d) = nearest_centroid(v, centroids);
        *label = best;
        inertia += d;
    }
    inertia
}

pub(crate) fn nearest_centroid(v: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(v, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Moves each empty centroid onto the point farthest from its own centroid,
/// taken from a cluster with more than one member. Returns the new inertia.
fn reseed_empty(
    data: &[&[f64]],
    centroids: &mut [Vec<f64>],
    labels: &mut [usize],
    mut inertia: f64,
) -> f64 {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return inertia;
        };
        let farthest = data
            .iter()
            .enumerate()
            .filter(|(i, _)| counts[labels[*i]] > 1)
            .map(|(i, v)| (i, squared_distance(v, &centroids[labels[i]])))
            .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        let Some((i, d)) = farthest else {
            return inertia;
        };
        centroids[empty] = data[i].to_vec();
        labels[i] = empty;
        inertia -= d;
    }
}

fn means(data: &[&[f64]], labels: &[usize], previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = data[0].len();
    let mut sums = vec![vec![0.0; dim]; previous.len()];
    let mut counts = vec![0usize; previous.len()];
    for (v, &l) in data.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(v.iter()) {
            *s += x;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(previous)
        .map(|((s, n), prev)| {
            if n == 0 {
                prev.clone()
            } else {
                s.into_iter().map(|x| x / n as f64).collect()
            }
        })
        .collect()
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(data: &[Vec<f64>]) -> Vec<&[f64]> {
        data.iter().map(|v| v.as_slice()).collect()
    }

    #[test]
    fn single_cluster_is_mean() {
        let data = vec![vec![1.0, 2.0], vec![3.0, 6.0], vec![5.0, 1.0]];
        let res = kmeans_raw(&raw(&data), 1, 7).unwrap();
        assert_eq!(res.labels, vec![0, 0, 0]);
        assert!((res.centroids[0][0] - 3.0).abs() < 1e-12);
        assert!((res.centroids[0][1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn separated_groups() {
        let mut data = Vec::new();
        for g in 0..3 {
            for _ in 0..4 {
                data.push(vec![10.0 * g as f64, 30.0 + 7.0 * g as f64, 5.0]);
            }
        }
        for seed in 0..10 {
            let res = kmeans_raw(&raw(&data), 3, seed).unwrap();
            assert_eq!(res.inertia, 0.0);
            for chunk in res.labels.chunks(4) {
                assert!(chunk.iter().all(|&l| l == chunk[0]));
            }
            let mut distinct = res.labels.clone();
            distinct.sort();
            distinct.dedup();
            assert_eq!(distinct.len(), 3);
        }
    }

    #[test]
    fn too_few_vectors() {
        let data = vec![vec![1.0], vec![2.0]];
        assert_eq!(
            kmeans_raw(&raw(&data), 3, 0).unwrap_err(),
            Error::InsufficientData { needed: 3, got: 2 }
        );
    }

    #[test]
    fn duplicate_points_fill_every_cluster() {
        // More clusters than distinct points forces the re-seeding policy.
        let data = vec![vec![1.0], vec![1.0], vec![1.0], vec![5.0]];
        let res = kmeans_raw(&raw(&data), 3, 3).unwrap();
        let mut counts = [0; 3];
        for &l in &res.labels {
            counts[l] += 1;
        }
        assert_eq!(res.inertia, 0.0);
        assert!(res.converged);
        assert_eq!(counts.iter().sum::<usize>(), 4);
    }

    #[test]
    fn deterministic() {
        let data: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i * 7 % 13) as f64, (i * 3 % 11) as f64])
            .collect();
        let a = kmeans_raw(&raw(&data), 4, 99).unwrap();
        let b = kmeans_raw(&raw(&data), 4, 99).unwrap();
        assert_eq!(a, b);
    }
}
