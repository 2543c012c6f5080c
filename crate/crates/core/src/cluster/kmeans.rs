use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{invalid_k, ClusterError};
use crate::scalar::sq_dist;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl KMeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, seed, restarts: 10, max_iter: 300, tol: 1e-6 }
    }

    pub fn restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit<T> {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<T>>,
    pub sse: T,
    /// SSE after each Lloyd iteration of the winning restart.
    pub history: Vec<T>,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Number of distinct points (exact comparison).
pub(crate) fn distinct_count<T: Scalar>(points: &[Vec<T>]) -> usize {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    let cmp = |a: &Vec<T>, b: &Vec<T>| a.partial_cmp(b).unwrap_or(Ordering::Equal);
    idx.sort_by(|&a, &b| cmp(&points[a], &points[b]));
    let mut n = 0;
    for (pos, &i) in idx.iter().enumerate() {
        if pos == 0 || points[idx[pos - 1]] != points[i] {
            n += 1;
        }
    }
    n
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let salt = (restart as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// k-means++ seeding.
fn init_plus_plus<T: Scalar>(points: &[Vec<T>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let n = points.len();
    let mut centroids = vec![points[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0]).to_f64_lossy()).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            // rounding can leave target >= acc; fall back to the last positive weight
            chosen.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("positive mass"))
        } else {
            rng.gen_range(0..n)
        };
        let c = points[pick].clone();
        for (i, p) in points.iter().enumerate() {
            let d = sq_dist(p, &c).to_f64_lossy();
            if d < d2[i] {
                d2[i] = d;
            }
        }
        centroids.push(c);
    }
    centroids
}

/// Nearest centroid, ties to the lowest index. Returns whether anything moved.
fn assign<T: Scalar>(points: &[Vec<T>], centroids: &[Vec<T>], labels: &mut [usize]) -> bool {
    let mut changed = false;
    for (p, label) in points.iter().zip(labels.iter_mut()) {
        let mut best = 0;
        let mut best_d = sq_dist(p, &centroids[0]);
        for (j, c) in centroids.iter().enumerate().skip(1) {
            let d = sq_dist(p, c);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        if *label != best {
            *label = best;
            changed = true;
        }
    }
    changed
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty<T: Scalar>(points: &[Vec<T>], centroids: &[Vec<T>], labels: &mut [usize], k: usize) {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    for j in 0..k {
        if sizes[j] > 0 {
            continue;
        }
        let mut far: Option<(usize, T)> = None;
        for (i, p) in points.iter().enumerate() {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[labels[i]]);
            if far.is_none_or(|(_, fd)| d > fd) {
                far = Some((i, d));
            }
        }
        if let Some((i, _)) = far {
            sizes[labels[i]] -= 1;
            labels[i] = j;
            sizes[j] = 1;
        }
    }
}

fn update<T: Scalar>(points: &[Vec<T>], labels: &[usize], old: &[Vec<T>]) -> Vec<Vec<T>> {
    let dim = points[0].len();
    let k = old.len();
    let mut sums = vec![vec![T::zero(); dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, &x) in sums[l].iter_mut().zip(p) {
            *s = *s + x;
        }
    }
    sums.into_iter()
        .zip(counts)
        .enumerate()
        .map(|(j, (s, c))| {
            if c == 0 {
                old[j].clone()
            } else {
                let c = T::from_usize_lossy(c);
                s.into_iter().map(|x| x / c).collect()
            }
        })
        .collect()
}

fn sse<T: Scalar>(points: &[Vec<T>], labels: &[usize], centroids: &[Vec<T>]) -> T {
    points.iter().zip(labels).map(|(p, &l)| sq_dist(p, &centroids[l])).sum()
}

fn lloyd<T: Scalar>(points: &[Vec<T>], params: &KMeansParams, rng: &mut ChaCha8Rng) -> KMeansFit<T> {
    let k = params.k;
    let mut centroids = init_plus_plus(points, k, rng);
    let mut labels = vec![usize::MAX; points.len()];
    let mut history: Vec<T> = Vec::new();
    let tol = T::from_f64_lossy(params.tol);
    for _ in 0..params.max_iter.max(1) {
        let changed = assign(points, &centroids, &mut labels);
        repair_empty(points, &centroids, &mut labels, k);
        if !changed && !history.is_empty() {
            break;
        }
        centroids = update(points, &labels, &centroids);
        let cur = sse(points, &labels, &centroids);
        let prev = history.last().copied();
        history.push(cur);
        match prev {
            Some(p) if p == T::zero() || (p - cur) / p < tol => break,
            _ if cur == T::zero() => break,
            _ => {}
        }
    }
    // labels must end nearest to the returned centroids
    if assign(points, &centroids, &mut labels) {
        repair_empty(points, &centroids, &mut labels, k);
        centroids = update(points, &labels, &centroids);
        history.push(sse(points, &labels, &centroids));
    }
    let sse = *history.last().expect("at least one iteration");
    KMeansFit { labels, centroids, sse, history, restart: 0 }
}

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by SSE.
///
/// Restart `r` draws from a ChaCha8 stream seeded by `(seed, r)`. Ties in SSE
/// go to the lowest restart index, so the result depends only on the inputs.
pub fn kmeans<T: Scalar>(points: &[Vec<T>], params: &KMeansParams) -> Result<KMeansFit<T>, ClusterError> {
    let k = params.k;
    if k == 0 {
        return Err(invalid_k(k, "k must be at least 1"));
    }
    if points.is_empty() {
        return Err(invalid_k(k, "no points"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(ClusterError::InvalidInput("points have differing dimensions".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ClusterError::InvalidInput("non-finite coordinate".into()));
    }
    let distinct = distinct_count(points);
    if k > distinct {
        return Err(invalid_k(k, format!("only {distinct} distinct points")));
    }
    let mut best: Option<KMeansFit<T>> = None;
    for r in 0..params.restarts.max(1) {
        let mut rng = restart_rng(params.seed, r);
        let mut fit = lloyd(points, params, &mut rng);
        fit.restart = r;
        if best.as_ref().is_none_or(|b| fit.sse < b.sse) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}
