//! Synthetic point clouds with analytic responses, and coordinate noise.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Dim, PointCloud, PointCloudBatch};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    /// Uniform points under a sum of three Gaussian bumps.
    GaussianBumps,
    /// Points between two concentric circles (spheres in 3D).
    Annulus,
    /// 2D points around a symmetric four-digit NACA section, denser near it.
    AirfoilLike,
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-bumps" => Ok(SynthKind::GaussianBumps),
            "annulus" => Ok(SynthKind::Annulus),
            "airfoil-like" => Ok(SynthKind::AirfoilLike),
            _ => Err(Error::invalid(format!(
                "unknown dataset {s:?}; expected gaussian-bumps, annulus or airfoil-like"
            ))),
        }
    }
}

/// Outer radius of the annulus.
pub const ANNULUS_OUTER: f64 = 0.95;
/// Chord of the airfoil section, centred on the origin along axis 0.
pub const AIRFOIL_CHORD: f64 = 1.0;

fn rng_for(seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    rng
}

/// `M` samples of `N` points each. Sample `m` depends only on `(kind, dim, N,
/// seed, m)`.
pub fn synth_dataset(kind: SynthKind, dim: Dim, samples: usize, n: usize, seed: u64) -> Result<PointCloudBatch> {
    if samples == 0 || n == 0 {
        return Err(Error::invalid("need at least one sample and one point"));
    }
    if kind == SynthKind::AirfoilLike && dim != Dim::Two {
        return Err(Error::invalid("airfoil-like data is two-dimensional"));
    }
    let clouds = (0..samples)
        .into_par_iter()
        .map(|m| {
            let mut rng = rng_for(seed, m);
            match kind {
                SynthKind::GaussianBumps => bumps(&mut rng, dim.get(), n),
                SynthKind::Annulus => annulus(&mut rng, dim.get(), n),
                SynthKind::AirfoilLike => airfoil(&mut rng, n),
            }
        })
        .collect();
    PointCloudBatch::new(dim, 1, clouds)
}

fn bumps(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointCloud {
    let params: Vec<(Vec<f64>, f64, f64)> = (0..3)
        .map(|_| {
            let c = (0..d).map(|_| rng.random_range(-0.6..0.6)).collect();
            (c, rng.random_range(0.2..0.4), rng.random_range(0.5..1.5))
        })
        .collect();
    let coords: Vec<f64> = (0..n * d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let u = coords
        .chunks_exact(d)
        .map(|p| {
            params
                .iter()
                .map(|(c, s, a)| {
                    let r2: f64 = p.iter().zip(c).map(|(x, y)| (x - y) * (x - y)).sum();
                    a * (-r2 / (2.0 * s * s)).exp()
                })
                .sum()
        })
        .collect();
    PointCloud::new(coords, u)
}

fn annulus(rng: &mut ChaCha8Rng, d: usize, n: usize) -> PointCloud {
    let inner: f64 = rng.random_range(0.3..0.5);
    let lo = inner.powi(d as i32);
    let hi = ANNULUS_OUTER.powi(d as i32);
    let mut coords = Vec::with_capacity(n * d);
    let mut u = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.random_range(lo..=hi).powf(1.0 / d as f64);
        let dir: Vec<f64> = loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        };
        coords.extend(dir.iter().map(|x| x * r));
        u.push((r / inner).ln() / (ANNULUS_OUTER / inner).ln() * (1.0 + 0.3 * dir[0]));
    }
    PointCloud::new(coords, u)
}

/// Half-thickness of a symmetric NACA section at chord fraction `x`.
pub fn naca_half_thickness(x: f64, t: f64) -> f64 {
    5.0 * t * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x.powi(3) - 0.1036 * x.powi(4))
}

fn airfoil(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
    let t = rng.random_range(0.08..0.16);
    let aoa = rng.random_range(-5.0f64..5.0).to_radians();
    let (sin, cos) = aoa.sin_cos();
    let mut coords = Vec::with_capacity(2 * n);
    let mut u = Vec::with_capacity(n);
    while u.len() < n {
        // body frame: chord along x in [-c/2, c/2]
        let (bx, by) = if rng.random_bool(0.6) {
            let s: f64 = rng.random();
            let xc = 0.5 * (1.0 - (PI * s).cos());
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let gap = -0.08 * (1.0 - rng.random::<f64>()).ln();
            (AIRFOIL_CHORD * (xc - 0.5), side * (AIRFOIL_CHORD * naca_half_thickness(xc, t) + gap))
        } else {
            let x: f64 = rng.random_range(-1.0..=1.0);
            let y: f64 = rng.random_range(-1.0..=1.0);
            let xc = x / AIRFOIL_CHORD + 0.5;
            if (0.0..=1.0).contains(&xc) && y.abs() <= AIRFOIL_CHORD * naca_half_thickness(xc, t) {
                continue;
            }
            (x, y)
        };
        let x = cos * bx + sin * by;
        let y = -sin * bx + cos * by;
        if x.abs() > 1.0 || y.abs() > 1.0 {
            continue;
        }
        coords.extend([x, y]);
        u.push(1.0 + 0.2 * x + 0.5 * y * (-(x * x + y * y)).exp());
    }
    PointCloud::new(coords, u)
}

/// Adds i.i.d. `N(0, sigma^2)` to every coordinate and clamps to `[-1, 1]`.
/// Responses are unchanged. Sample `m` uses stream `m` of `seed`.
pub fn add_coordinate_noise(cloud: &PointCloudBatch, sigma: f64, seed: u64) -> Result<PointCloudBatch> {
    let bad = || Error::invalid(format!("noise level must be finite and >= 0, got {sigma}"));
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(bad());
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| bad())?;
    let samples = cloud
        .samples()
        .par_iter()
        .enumerate()
        .map(|(m, s)| {
            let mut rng = rng_for(seed, m);
            let coords = s
                .coords
                .iter()
                .map(|&x| (x + normal.sample(&mut rng)).clamp(-1.0, 1.0))
                .collect();
            PointCloud::new(coords, s.channels.clone())
        })
        .collect();
    PointCloudBatch::new(cloud.dim(), cloud.channels(), samples)
}
