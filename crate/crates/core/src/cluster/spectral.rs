use nalgebra::{DMatrix, SymmetricEigen};

use super::{invalid_k, kmeans, AffinityMatrix, ClusterError, KMeansParams};
use crate::Scalar;

/// Row-normalized embedding on the eigenvectors of the `k` largest
/// eigenvalues of `D^-1/2 W D^-1/2`, where `W` is the affinity with its
/// diagonal zeroed.
///
/// The eigendecomposition runs in `f64`. Eigenvector signs are fixed so the
/// entry of largest magnitude (lowest index on ties) is positive.
pub fn spectral_embedding<T: Scalar>(a: &AffinityMatrix<T>, k: usize) -> Result<Vec<Vec<T>>, ClusterError> {
    let n = a.n();
    if k == 0 {
        return Err(invalid_k(k, "k must be at least 1"));
    }
    if k > n {
        return Err(invalid_k(k, format!("only {n} rows")));
    }
    let w = DMatrix::<f64>::from_fn(n, n, |i, j| if i == j { 0.0 } else { a.get(i, j).to_f64_lossy() });
    let degrees: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let isolated: Vec<String> = degrees
        .iter()
        .enumerate()
        .filter(|(_, &d)| d <= 0.0)
        .map(|(i, _)| a.ids()[i].clone())
        .collect();
    if !isolated.is_empty() {
        return Err(ClusterError::IsolatedRows(isolated));
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut l = DMatrix::<f64>::from_fn(n, n, |i, j| inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]);
    // exact symmetry for the solver
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (l[(i, j)] + l[(j, i)]);
            l[(i, j)] = m;
            l[(j, i)] = m;
        }
    }
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[y]
            .partial_cmp(&eig.eigenvalues[x])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.cmp(&y))
    });
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let mut pivot = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        cols.push(v);
    }
    Ok((0..n)
        .map(|i| {
            let row: Vec<f64> = cols.iter().map(|c| c[i]).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            row.into_iter()
                .map(|x| T::from_f64_lossy(if norm > 0.0 { x / norm } else { 0.0 }))
                .collect()
        })
        .collect())
}

/// Spectral clustering with 10 k-means restarts.
pub fn spectral_cluster<T: Scalar>(a: &AffinityMatrix<T>, k: usize, seed: u64) -> Result<Vec<usize>, ClusterError> {
    spectral_cluster_with(a, &KMeansParams::new(k, seed))
}

pub fn spectral_cluster_with<T: Scalar>(a: &AffinityMatrix<T>, params: &KMeansParams) -> Result<Vec<usize>, ClusterError> {
    if params.k == 1 {
        if a.n() == 0 {
            return Err(invalid_k(1, "no rows"));
        }
        return Ok(vec![0; a.n()]);
    }
    let emb = spectral_embedding(a, params.k)?;
    Ok(kmeans(&emb, params)?.labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blocks(sizes: &[usize]) -> AffinityMatrix<f64> {
        let n: usize = sizes.iter().sum();
        let mut block_of = Vec::new();
        for (b, &s) in sizes.iter().enumerate() {
            block_of.extend(std::iter::repeat_n(b, s));
        }
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if block_of[i] == block_of[j] { 1.0 } else { 0.0 }).collect())
            .collect();
        AffinityMatrix::from_rows((0..n).map(|i| format!("r{i}")).collect(), rows).unwrap()
    }

    #[test]
    fn k_one_is_single_cluster() {
        assert_eq!(spectral_cluster(&blocks(&[3, 2]), 1, 0).unwrap(), vec![0; 5]);
    }

    #[test]
    fn two_blocks_separate() {
        let labels = spectral_cluster(&blocks(&[5, 5]), 2, 42).unwrap();
        assert!(labels[..5].iter().all(|&l| l == labels[0]));
        assert!(labels[5..].iter().all(|&l| l == labels[5]));
        assert_ne!(labels[0], labels[5]);
    }

    #[test]
    fn isolated_rows_reported() {
        let a = blocks(&[3, 1]);
        match spectral_cluster(&a, 2, 0) {
            Err(ClusterError::IsolatedRows(ids)) => assert_eq!(ids, vec!["r3".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn k_above_n_rejected() {
        assert!(matches!(spectral_cluster(&blocks(&[2]), 3, 0), Err(ClusterError::InvalidK { .. })));
    }

    #[test]
    fn embedding_rows_unit_length() {
        let emb = spectral_embedding(&blocks(&[4, 3, 3]), 3).unwrap();
        for r in emb {
            let norm: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn leading_eigenvalues_accurate() {
        // W = J - I on one block of n: normalized spectrum is {1, -1/(n-1) x (n-1)}
        let a = blocks(&[6]);
        let n = 6;
        let w = DMatrix::<f64>::from_fn(n, n, |i, j| if i == j { 0.0 } else { a.get(i, j) / (n as f64 - 1.0) });
        let eig = SymmetricEigen::new(w);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-8);
        for x in &ev[1..] {
            assert!((x + 0.2).abs() < 1e-8);
        }
    }
}
