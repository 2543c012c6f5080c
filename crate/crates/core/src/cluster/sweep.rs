use std::io::{self, Write};

use super::kmeans::distinct_count;
use super::{invalid_k, kmeans, spectral_embedding, AffinityMatrix, ClusterError, KMeansParams};
use crate::Scalar;

/// Within-cluster SSE per `k`, ascending and consecutive.
#[derive(Debug, Clone, PartialEq)]
pub struct SSECurve<T> {
    pub points: Vec<(usize, T)>,
}

impl<T: Scalar> SSECurve<T> {
    /// `sse.csv` body.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,sse")?;
        for (k, s) in &self.points {
            writeln!(out, "{k},{:.6}", s.to_f64_lossy())?;
        }
        Ok(())
    }
}

/// What the sweep clusters for each `k`.
#[derive(Debug, Clone, Copy)]
pub enum SweepData<'a, T> {
    /// k-means directly on the vectors.
    RawKmeans(&'a [Vec<T>]),
    /// k-means on the k-dimensional spectral embedding, rebuilt per `k`.
    SpectralEmbedding(&'a AffinityMatrix<T>),
}

pub fn sse_sweep<T: Scalar>(
    data: SweepData<'_, T>,
    k_min: usize,
    k_max: usize,
    seed: u64,
    restarts: usize,
) -> Result<SSECurve<T>, ClusterError> {
    let n = match data {
        SweepData::RawKmeans(p) => p.len(),
        SweepData::SpectralEmbedding(a) => a.n(),
    };
    if k_min == 0 || k_min > k_max || k_max > n {
        return Err(invalid_k(k_max, format!("sweep bounds need 1 <= {k_min} <= {k_max} <= {n}")));
    }
    let mut points = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let params = KMeansParams::new(k, seed).restarts(restarts);
        let sse = match data {
            SweepData::RawKmeans(p) => fit_or_zero(p, &params)?,
            SweepData::SpectralEmbedding(a) => {
                let emb = spectral_embedding(a, k)?;
                fit_or_zero(&emb, &params)?
            }
        };
        points.push((k, sse));
    }
    Ok(SSECurve { points })
}

/// With more clusters than distinct points every point sits on its own
/// centroid.
fn fit_or_zero<T: Scalar>(points: &[Vec<T>], params: &KMeansParams) -> Result<T, ClusterError> {
    if params.k > distinct_count(points) {
        return Ok(T::zero());
    }
    Ok(kmeans(points, params)?.sse)
}

/// `k` whose curve point lies farthest from the chord joining the first and
/// last points; ties go to the smallest `k`.
pub fn suggest_knee<T: Scalar>(curve: &SSECurve<T>) -> Result<usize, ClusterError> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(ClusterError::CurveTooShort(pts.len()));
    }
    let xy: Vec<(f64, f64)> = pts.iter().map(|&(k, s)| (k as f64, s.to_f64_lossy())).collect();
    let (x0, y0) = xy[0];
    let (x1, y1) = xy[xy.len() - 1];
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    let mut best = (pts[0].0, 0.0f64);
    for (&(k, _), &(x, y)) in pts.iter().zip(&xy) {
        let d = if len > 0.0 { (dx * (y - y0) - dy * (x - x0)).abs() / len } else { 0.0 };
        if d > best.1 {
            best = (k, d);
        }
    }
    Ok(best.0)
}
