//! Wall-clock scaling of encoding and reconstruction.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, fit_loglog, LineFit};
use crate::grid::{encode_response, encode_topology, reconstruct, Dim, PointCloud, PointCloudBatch, ResponseShift};

/// A `t` statistic above this counts as a significant regression term.
pub const SIGNIFICANT_T: f64 = 5.0;

fn uniform_cloud(n: usize, seed: u64) -> Result<PointCloudBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let u = coords.chunks_exact(2).map(|p| 1.0 + p[0] * p[1]).collect();
    PointCloudBatch::new(Dim::Two, 1, vec![PointCloud::new(coords, u)])
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

fn time<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    // one untimed warm-up call
    f()?;
    let mut secs = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        std::hint::black_box(f()?);
        secs.push(t.elapsed().as_secs_f64());
    }
    Ok(median(secs))
}

#[derive(Clone, Debug, Serialize)]
pub struct EncodingBench {
    pub resolution: usize,
    pub points: Vec<usize>,
    /// Median seconds per topology encoding.
    pub median_secs: Vec<f64>,
    /// Slope of `ln T` against `ln N`.
    pub exponent: LineFit,
}

/// Times topology encoding of one uniform 2D cloud for each `N`.
pub fn bench_encoding(points: &[usize], resolution: usize, repeats: usize, seed: u64) -> Result<EncodingBench> {
    if points.len() < 2 || repeats == 0 {
        return Err(Error::invalid("need at least two point counts and one repeat"));
    }
    let mut median_secs = Vec::with_capacity(points.len());
    for &n in points {
        let cloud = uniform_cloud(n, seed)?;
        median_secs.push(time(repeats, || encode_topology(&cloud, resolution))?);
    }
    let x: Vec<f64> = points.iter().map(|&n| n as f64).collect();
    let exponent = fit_loglog(&x, &median_secs)
        .ok_or_else(|| Error::invalid("point counts must be distinct and timings positive"))?;
    Ok(EncodingBench {
        resolution,
        points: points.to_vec(),
        median_secs,
        exponent,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionBench {
    pub points: usize,
    pub resolutions: Vec<usize>,
    pub median_secs: Vec<f64>,
    /// `T = a + b r^2` at fixed `N`.
    pub r2_fit: LineFit,
}

impl ReconstructionBench {
    /// Whether the `r^2` coefficient is positive and significant.
    pub fn has_r2_term(&self) -> bool {
        self.r2_fit.slope > 0.0 && self.r2_fit.t_statistic() > SIGNIFICANT_T
    }
}

/// Times reconstruction at fixed `N` over growing resolutions. Grids are
/// encoded once per resolution outside the timed region.
pub fn bench_reconstruction(
    points: usize,
    resolutions: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<ReconstructionBench> {
    if resolutions.len() < 3 || repeats == 0 {
        return Err(Error::invalid("need at least three resolutions and one repeat"));
    }
    let cloud = uniform_cloud(points, seed)?;
    let mut median_secs = Vec::with_capacity(resolutions.len());
    for &r in resolutions {
        let g_o = encode_topology(&cloud, r)?;
        let g_u = encode_response(&cloud, r, ResponseShift::None)?;
        median_secs.push(time(repeats, || reconstruct(&g_o, &g_u, &cloud))?);
    }
    let r2: Vec<f64> = resolutions.iter().map(|&r| (r * r) as f64).collect();
    let r2_fit = fit_line(&r2, &median_secs).ok_or_else(|| Error::invalid("resolutions must be distinct"))?;
    Ok(ReconstructionBench {
        points,
        resolutions: resolutions.to_vec(),
        median_secs,
        r2_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn small_benchmarks_run() {
        let e = bench_encoding(&[1000, 4000, 16000], 32, 3, 0).unwrap();
        assert_eq!(e.median_secs.len(), 3);
        assert!(e.median_secs.iter().all(|t| *t > 0.0));
        let r = bench_reconstruction(1000, &[16, 32, 64], 2, 0).unwrap();
        assert_eq!(r.median_secs.len(), 3);
        assert!(bench_encoding(&[10], 8, 1, 0).is_err());
        assert!(bench_reconstruction(10, &[8, 16], 1, 0).is_err());
    }
}
