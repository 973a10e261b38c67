//! Empirical interpolation-error orders of the encode/reconstruct round trip.
//!
//! For each resolution a stratified cloud (a symmetric `k^d` sub-lattice in
//! every cell) samples an analytic field, the field is encoded, and the
//! reconstruction is compared with the truth at fresh random points. Error
//! orders come from least-squares fits of `ln(error)` against `ln(h)`.
//!
//! Evaluation points are drawn from `[-1 + h, 1 - h]^d`, so every cell that is
//! read has only interior vertices. Outermost vertices see points on one side
//! only, and their footprint average is then biased by `O(h)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fit::{fit_loglog, LineFit};
use crate::grid::{
    encode_response, encode_topology, Dim, PointCloud, PointCloudBatch, ResponseShift,
};

/// Grid spacing `2 / (r - 1)` of `r` vertices on `[-1, 1]`.
pub fn grid_spacing(resolution: usize) -> f64 {
    2.0 / (resolution as f64 - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Smoothness {
    /// Twice continuously differentiable.
    C2,
    /// Once differentiable with Hölder-continuous first derivatives.
    C1Alpha,
    /// Continuous, Hölder with exponent `gamma`.
    C0Gamma,
}

/// Analytic test fields on `[-1, 1]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Field {
    /// `prod_k sin(pi x_k)`.
    SineProduct,
    /// `|x_0|^p`.
    AbsPower(f64),
    /// `a + b . x`; reconstructed exactly up to the stabilizer.
    Affine,
}

impl Field {
    pub fn eval(&self, p: &[f64]) -> f64 {
        match *self {
            Field::SineProduct => p.iter().map(|x| (PI * x).sin()).product(),
            Field::AbsPower(e) => p[0].abs().powf(e),
            Field::Affine => 0.5 + p.iter().enumerate().map(|(k, x)| (k + 1) as f64 * 0.25 * x).sum::<f64>(),
        }
    }

    /// `max (|H_xx| + |H_yy| + ..)` where the field is C2.
    pub fn second_derivative_bound(&self, dim: Dim) -> Option<f64> {
        match self {
            Field::SineProduct => Some(dim.get() as f64 * PI * PI),
            Field::Affine => Some(0.0),
            Field::AbsPower(e) if *e >= 2.0 => Some(e * (e - 1.0)),
            Field::AbsPower(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothnessCase {
    pub label: Smoothness,
    pub field: Field,
    pub expected_order: f64,
}

impl SmoothnessCase {
    pub fn new(label: Smoothness, field: Field, expected_order: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&expected_order) {
            return Err(Error::invalid(format!(
                "expected order must lie in [0, 2], got {expected_order}"
            )));
        }
        Ok(Self {
            label,
            field,
            expected_order,
        })
    }

    /// `sin(pi x) sin(pi y)`, order 2.
    pub fn smooth() -> Self {
        Self {
            label: Smoothness::C2,
            field: Field::SineProduct,
            expected_order: 2.0,
        }
    }

    /// `|x|^(1 + alpha)`, order `1 + alpha`.
    pub fn holder_derivative(alpha: f64) -> Result<Self> {
        Self::new(Smoothness::C1Alpha, Field::AbsPower(1.0 + alpha), 1.0 + alpha)
    }

    /// `|x|`, a Lipschitz kink, order 1.
    pub fn kink() -> Self {
        Self {
            label: Smoothness::C0Gamma,
            field: Field::AbsPower(1.0),
            expected_order: 1.0,
        }
    }

    /// `|x|^gamma` for `gamma` in `(0, 1]`, order `gamma`.
    pub fn holder(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must lie in (0, 1], got {gamma}")));
        }
        Self::new(Smoothness::C0Gamma, Field::AbsPower(gamma), gamma)
    }

    /// Pointwise bound `(1/8) max(|H_xx| + |H_yy|) h^2` for C2 fields.
    pub fn interpolation_bound(&self, dim: Dim, h: f64) -> Option<f64> {
        self.field
            .second_derivative_bound(dim)
            .map(|m| 0.125 * m * h * h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub dim: Dim,
    pub resolutions: Vec<usize>,
    /// Encoding points per cell; rounded down to a perfect `d`-th power.
    pub points_per_cell: usize,
    pub eval_points: usize,
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            dim: Dim::Two,
            resolutions: vec![17, 33, 65, 129, 257],
            points_per_cell: 9,
            eval_points: 20_000,
            seed: 0,
        }
    }
}

/// Slopes of the two error norms against `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub rms: LineFit,
    pub max: LineFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub case: SmoothnessCase,
    pub resolutions: Vec<usize>,
    pub spacings: Vec<f64>,
    pub max_errors: Vec<f64>,
    pub rms_errors: Vec<f64>,
    /// `None` when the reconstruction is exact at every resolution.
    pub fit: Option<SlopeFit>,
}

impl ConvergenceReport {
    pub fn is_exact(&self) -> bool {
        self.fit.is_none()
    }

    pub fn rms_slope(&self) -> Option<f64> {
        self.fit.map(|f| f.rms.slope)
    }

    pub fn max_slope(&self) -> Option<f64> {
        self.fit.map(|f| f.max.slope)
    }

    /// Pointwise C2 bound at each resolution, if the field has one.
    pub fn bounds(&self, dim: Dim) -> Option<Vec<f64>> {
        self.spacings
            .iter()
            .map(|&h| self.case.interpolation_bound(dim, h))
            .collect()
    }

    /// `(h, max_error, rms_error)` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("resolution,h,max_error,rms_error\n");
        for i in 0..self.resolutions.len() {
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                self.resolutions[i], self.spacings[i], self.max_errors[i], self.rms_errors[i]
            ));
        }
        out
    }
}

/// Errors at or below this fraction of the field scale count as exact.
const EXACT_RTOL: f64 = 1e-6;

/// Points per axis and cell used for a requested per-cell density.
pub fn sublattice_per_axis(points_per_cell: usize, dim: Dim) -> usize {
    let d = dim.get() as u32;
    let mut k = 1;
    while (k + 1usize).pow(d) <= points_per_cell {
        k += 1;
    }
    k
}

/// Cell-stratified cloud: `k` symmetric offsets `(i + 1/2) / k` per axis in
/// every cell.
pub fn stratified_cloud(dim: Dim, resolution: usize, per_axis: usize) -> Vec<f64> {
    let h = grid_spacing(resolution);
    let axis: Vec<f64> = (0..resolution - 1)
        .flat_map(|c| {
            (0..per_axis).map(move |i| {
                let x = -1.0 + h * (c as f64 + (i as f64 + 0.5) / per_axis as f64);
                x.clamp(-1.0, 1.0)
            })
        })
        .collect();
    let d = dim.get();
    let n = axis.len().pow(d as u32);
    let mut coords = Vec::with_capacity(n * d);
    for flat in 0..n {
        let mut rest = flat;
        let mut p = [0.0; 3];
        for a in (0..d).rev() {
            p[a] = axis[rest % axis.len()];
            rest /= axis.len();
        }
        coords.extend_from_slice(&p[..d]);
    }
    coords
}

struct Errors {
    max: f64,
    rms: f64,
    scale: f64,
}

fn errors_at(case: &SmoothnessCase, cfg: &ConvergenceConfig, r: usize, k: usize) -> Result<Errors> {
    let dim = cfg.dim;
    let d = dim.get();
    let coords = stratified_cloud(dim, r, k);
    let values: Vec<f64> = coords.chunks_exact(d).map(|p| case.field.eval(p)).collect();
    let cloud = PointCloudBatch::new(dim, 1, vec![PointCloud::new(coords, values)])?;
    let g_o = encode_topology(&cloud, r)?;
    let g_u = encode_response(&cloud, r, ResponseShift::AutoOffset)?;

    let h = grid_spacing(r);
    let lo = -1.0 + h;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let eval: Vec<f64> = (0..cfg.eval_points * d)
        .map(|_| rng.random_range(lo..=-lo))
        .collect();
    let truth: Vec<f64> = eval.chunks_exact(d).map(|p| case.field.eval(p)).collect();
    let eval = PointCloudBatch::from_coords(dim, vec![eval])?;
    let rec = crate::grid::reconstruct(&g_o, &g_u, &eval)?;

    let mut max = 0.0f64;
    let mut sq = 0.0;
    let mut scale = 0.0f64;
    for (u, t) in rec[0].iter().zip(&truth) {
        let e = (u - t).abs();
        max = max.max(e);
        sq += e * e;
        scale = scale.max(t.abs());
    }
    Ok(Errors {
        max,
        rms: (sq / truth.len() as f64).sqrt(),
        scale,
    })
}

/// Runs the round-trip experiment over `cfg.resolutions` and fits error orders.
pub fn run_convergence(case: &SmoothnessCase, cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    if cfg.resolutions.len() < 4 {
        return Err(Error::invalid("a convergence study needs at least 4 resolutions"));
    }
    if cfg.resolutions.windows(2).any(|w| w[0] >= w[1]) || cfg.resolutions[0] < 4 {
        return Err(Error::invalid(
            "resolutions must be strictly increasing and at least 4",
        ));
    }
    if cfg.points_per_cell < 4 || cfg.eval_points == 0 {
        return Err(Error::invalid(
            "need at least 4 points per cell and one evaluation point",
        ));
    }
    let k = sublattice_per_axis(cfg.points_per_cell, cfg.dim).max(2);
    let runs: Vec<Errors> = cfg
        .resolutions
        .par_iter()
        .map(|&r| errors_at(case, cfg, r, k))
        .collect::<Result<_>>()?;

    let spacings: Vec<f64> = cfg.resolutions.iter().map(|&r| grid_spacing(r)).collect();
    let max_errors: Vec<f64> = runs.iter().map(|e| e.max).collect();
    let rms_errors: Vec<f64> = runs.iter().map(|e| e.rms).collect();
    let scale = runs.iter().map(|e| e.scale).fold(1.0, f64::max);
    let exact = max_errors.iter().all(|&e| e <= EXACT_RTOL * scale);
    let fit = if exact {
        None
    } else {
        let rms = fit_loglog(&spacings, &rms_errors);
        let max = fit_loglog(&spacings, &max_errors);
        match (rms, max) {
            (Some(rms), Some(max)) => Some(SlopeFit { rms, max }),
            _ => return Err(Error::invalid("error sequence cannot be fitted")),
        }
    };
    Ok(ConvergenceReport {
        case: *case,
        resolutions: cfg.resolutions.clone(),
        spacings,
        max_errors,
        rms_errors,
        fit,
    })
}
