//! Seeded k-means with k-means++ initialization.
//!
//! Restarts, the iteration cap, and every random draw are driven by one
//! seed, so a fixed seed reproduces labels bit for bit.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone)]
pub struct KMeansParams {
    pub clusters: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl KMeansParams {
    /// Standard pipeline settings: 10 restarts, 300 iteration cap.
    pub fn new(clusters: usize, seed: u64) -> Self {
        Self {
            clusters,
            restarts: 10,
            max_iterations: 300,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit<T: Real> {
    pub labels: Vec<usize>,
    pub inertia: T,
}

/// Clusters the rows of `points`; the restart with the lowest inertia wins,
/// earliest restart on ties.
pub fn kmeans<T: Real>(points: &Array2<T>, params: &KMeansParams) -> Result<KMeansFit<T>> {
    let m = points.nrows();
    let k = params.clusters;
    if m == 0 {
        return Err(Error::InvalidInput("no points to cluster".into()));
    }
    if k < 1 || k > m {
        return Err(Error::InvalidParameter(format!(
            "cluster count must lie in 1..={m}, got {k}"
        )));
    }
    if params.restarts < 1 || params.max_iterations < 1 {
        return Err(Error::InvalidParameter(
            "restarts and max_iterations must be >= 1".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<KMeansFit<T>> = None;
    for _ in 0..params.restarts {
        let fit = run_once(points, k, params.max_iterations, &mut rng);
        let improved = match &best {
            None => true,
            Some(b) => fit.inertia < b.inertia,
        };
        if improved {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn run_once<T: Real>(
    points: &Array2<T>,
    k: usize,
    max_iterations: usize,
    rng: &mut ChaCha8Rng,
) -> KMeansFit<T> {
    let m = points.nrows();
    let dim = points.ncols();
    let mut centers = plus_plus_init(points, k, rng);
    let mut labels = vec![usize::MAX; m];

    for _ in 0..max_iterations {
        let mut changed = false;
        for i in 0..m {
            let nearest = nearest_center(points, i, &centers);
            if labels[i] != nearest {
                labels[i] = nearest;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        // Recompute means.
        let mut sums = Array2::<T>::zeros((k, dim));
        let mut counts = vec![0usize; k];
        for i in 0..m {
            counts[labels[i]] += 1;
            for d in 0..dim {
                sums[[labels[i], d]] = sums[[labels[i], d]] + points[[i, d]];
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let inv = T::one() / T::of(counts[c] as f64);
            for d in 0..dim {
                centers[[c, d]] = sums[[c, d]] * inv;
            }
        }
        // An empty cluster steals the point farthest from its own center,
        // lowest index on ties; only clusters with two or more members
        // donate.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut donor: Option<(usize, T)> = None;
            for i in 0..m {
                if counts[labels[i]] < 2 {
                    continue;
                }
                let dist = sq_distance_to_center(points, i, &centers, labels[i]);
                let take = match donor {
                    None => true,
                    Some((_, best)) => dist > best,
                };
                if take {
                    donor = Some((i, dist));
                }
            }
            if let Some((i, _)) = donor {
                counts[labels[i]] -= 1;
                counts[c] += 1;
                labels[i] = c;
                for d in 0..dim {
                    centers[[c, d]] = points[[i, d]];
                }
            }
        }
    }

    let mut inertia = T::zero();
    for i in 0..m {
        inertia = inertia + sq_distance_to_center(points, i, &centers, labels[i]);
    }
    KMeansFit { labels, inertia }
}

/// k-means++ seeding: first center uniform, each next center drawn with
/// probability proportional to squared distance from the chosen set.
fn plus_plus_init<T: Real>(points: &Array2<T>, k: usize, rng: &mut ChaCha8Rng) -> Array2<T> {
    let m = points.nrows();
    let dim = points.ncols();
    let mut centers = Array2::<T>::zeros((k, dim));
    let mut chosen = vec![false; m];

    let first = rng.random_range(0..m);
    chosen[first] = true;
    centers.row_mut(0).assign(&points.row(first));

    let mut dist2: Vec<f64> = (0..m)
        .map(|i| sq_distance_to_center(points, i, &centers, 0).as_f64())
        .collect();

    for c in 1..k {
        let total: f64 = dist2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = m - 1;
            for (i, &w) in dist2.iter().enumerate() {
                if u < w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            // All remaining mass is zero (duplicate points); take the
            // lowest unchosen index.
            (0..m).find(|&i| !chosen[i]).unwrap_or(0)
        };
        chosen[next] = true;
        centers.row_mut(c).assign(&points.row(next));
        for i in 0..m {
            let d = sq_distance_to_center(points, i, &centers, c).as_f64();
            if d < dist2[i] {
                dist2[i] = d;
            }
        }
    }
    centers
}

fn nearest_center<T: Real>(points: &Array2<T>, i: usize, centers: &Array2<T>) -> usize {
    let mut best = 0;
    let mut best_d = sq_distance_to_center(points, i, centers, 0);
    for c in 1..centers.nrows() {
        let d = sq_distance_to_center(points, i, centers, c);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn sq_distance_to_center<T: Real>(
    points: &Array2<T>,
    i: usize,
    centers: &Array2<T>,
    c: usize,
) -> T {
    let mut sq = T::zero();
    for d in 0..points.ncols() {
        let diff = points[[i, d]] - centers[[c, d]];
        sq = sq + diff * diff;
    }
    sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn well_separated() -> Array2<f64> {
        array![
            [0.0, 0.0],
            [0.1, -0.1],
            [0.05, 0.02],
            [10.0, 10.0],
            [10.1, 9.9],
            [9.95, 10.05],
        ]
    }

    #[test]
    fn recovers_separated_clusters() {
        let fit = kmeans(&well_separated(), &KMeansParams::new(2, 42)).unwrap();
        assert_eq!(fit.labels[0], fit.labels[1]);
        assert_eq!(fit.labels[1], fit.labels[2]);
        assert_eq!(fit.labels[3], fit.labels[4]);
        assert_eq!(fit.labels[4], fit.labels[5]);
        assert_ne!(fit.labels[0], fit.labels[3]);
        assert!(fit.inertia < 0.1);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = kmeans(&well_separated(), &KMeansParams::new(2, 7)).unwrap();
        let b = kmeans(&well_separated(), &KMeansParams::new(2, 7)).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia, b.inertia);
    }

    #[test]
    fn one_cluster_collapses_labels() {
        let fit = kmeans(&well_separated(), &KMeansParams::new(1, 0)).unwrap();
        assert!(fit.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn k_equal_m_gives_singletons() {
        let points = array![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0]];
        let fit = kmeans(&points, &KMeansParams::new(4, 3)).unwrap();
        let mut sorted = fit.labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
        assert_eq!(fit.inertia, 0.0);
    }

    #[test]
    fn rejects_bad_cluster_counts() {
        let points = well_separated();
        assert!(kmeans(&points, &KMeansParams::new(0, 0)).is_err());
        assert!(kmeans(&points, &KMeansParams::new(7, 0)).is_err());
    }

    #[test]
    fn duplicate_points_still_terminate() {
        let points = Array2::<f64>::zeros((5, 2));
        let fit = kmeans(&points, &KMeansParams::new(3, 1)).unwrap();
        assert_eq!(fit.labels.len(), 5);
        assert!(fit.labels.iter().all(|&l| l < 3));
    }

    #[test]
    fn f32_points_cluster_too() {
        let points = array![[0.0f32, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]];
        let fit = kmeans(&points, &KMeansParams::new(2, 9)).unwrap();
        assert_eq!(fit.labels[0], fit.labels[1]);
        assert_ne!(fit.labels[0], fit.labels[2]);
    }
}
