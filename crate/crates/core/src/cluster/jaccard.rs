use super::{ClusterError, TouchMatrix};
use crate::Scalar;

/// Dense symmetric affinity matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix<T> {
    ids: Vec<String>,
    data: Vec<T>,
}

impl<T: Scalar> AffinityMatrix<T> {
    /// Validates symmetry (1e-12), finiteness and the `[0, 1]` range.
    pub fn from_rows(ids: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self, ClusterError> {
        let n = ids.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ClusterError::InvalidInput("affinity must be n x n".into()));
        }
        let tol = T::from_f64_lossy(1e-12);
        for i in 0..n {
            for j in 0..n {
                let x = rows[i][j];
                if !(x >= T::zero() && x <= T::one()) {
                    return Err(ClusterError::InvalidInput(format!("affinity[{i}][{j}] outside [0,1]")));
                }
                if (x - rows[j][i]).abs() > tol {
                    return Err(ClusterError::InvalidInput(format!("affinity not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { ids, data: rows.into_iter().flatten().collect() })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.n();
        &self.data[i * n..(i + 1) * n]
    }

    /// Same matrix with rows and columns reordered: new row `r` is old row `perm[r]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n());
        self.select(perm)
    }

    /// Restricts to the listed rows/columns, in order.
    pub fn select(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(keep.len() * keep.len());
        for &i in keep {
            for &j in keep {
                data.push(self.get(i, j));
            }
        }
        Self { ids: keep.iter().map(|&i| self.ids[i].clone()).collect(), data }
    }
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// `|A ∩ B| / |A ∪ B|` over the touched-column sets of each row pair.
///
/// The raw matrix has a unit diagonal. Rows are never empty, so the 0/0 case
/// does not arise.
pub fn jaccard_affinity<T: Scalar>(m: &TouchMatrix) -> AffinityMatrix<T> {
    let n = m.n_rows();
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        data[i * n + i] = T::one();
        for j in (i + 1)..n {
            let (a, b) = (m.row(i), m.row(j));
            let inter = intersection_len(a, b);
            let union = a.len() + b.len() - inter;
            let s = T::from_usize_lossy(inter) / T::from_usize_lossy(union);
            data[i * n + j] = s;
            data[j * n + i] = s;
        }
    }
    AffinityMatrix { ids: m.rows().to_vec(), data }
}
