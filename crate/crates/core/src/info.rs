//! Information content, in bits, of a raw point cloud and of three grid
//! encodings of it: binary occupancy, per-cell counts, and the footprint
//! encoding.
//!
//! Every quantity is `log2` of a configuration count. Binomials are evaluated
//! through log-gamma so that non-integer slot counts such as `4 / delta_eff^2`
//! are handled without rounding.

use serde::Serialize;
use std::f64::consts::LN_2;

use crate::convergence::grid_spacing;
use crate::error::{Error, Result};

/// `log2 C(n, k)` for real `n >= k >= 0`.
pub fn log2_binomial(n: f64, k: f64) -> Result<f64> {
    if !(k >= 0.0 && n >= k) {
        return Err(Error::invalid(format!(
            "log2_binomial needs n >= k >= 0, got n={n}, k={k}"
        )));
    }
    Ok(ln_binomial(n, k) / LN_2)
}

fn ln_binomial(n: f64, k: f64) -> f64 {
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// Raw point cloud: `N` indistinguishable points in `4 / delta^2` slots.
pub fn info_raw(n: usize, delta: f64) -> Result<f64> {
    slots_info(n, 4.0 / (delta * delta))
}

fn slots_info(n: usize, slots: f64) -> Result<f64> {
    if !(slots >= n as f64) {
        return Err(Error::invalid(format!(
            "{slots} positions cannot hold {n} points"
        )));
    }
    log2_binomial(slots, n as f64)
}

/// Binary occupancy of `(r - 1)^2` cells, summed over every possible number
/// of occupied cells with log-sum-exp.
pub fn info_binary(n: usize, resolution: usize) -> Result<f64> {
    check(n, resolution)?;
    let cells = cells(resolution);
    let top = n.min(cells as usize);
    let terms = (1..=top).map(|q| ln_binomial(cells, q as f64));
    Ok(log_sum_exp(terms) / LN_2)
}

/// Per-cell counts ("stars and bars"): `log2 C(N + (r-1)^2 - 1, N)`.
pub fn info_count(n: usize, resolution: usize) -> Result<f64> {
    check(n, resolution)?;
    log2_binomial(n as f64 + cells(resolution) - 1.0, n as f64)
}

/// Footprint encoding with effective quantization
/// `delta_eff^2 = delta^2 + eta * h^2`.
pub fn info_proposed(n: usize, resolution: usize, delta: f64, eta: f64) -> Result<f64> {
    check(n, resolution)?;
    if eta < 0.0 {
        return Err(Error::invalid(format!("eta must be non-negative, got {eta}")));
    }
    let h = grid_spacing(resolution);
    slots_info(n, 4.0 / (delta * delta + eta * h * h))
}

fn cells(resolution: usize) -> f64 {
    let c = resolution as f64 - 1.0;
    c * c
}

fn check(n: usize, resolution: usize) -> Result<()> {
    if resolution < 2 || n == 0 {
        return Err(Error::invalid(format!(
            "need r >= 2 and N >= 1, got r={resolution}, N={n}"
        )));
    }
    Ok(())
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// All four information contents for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfoContentReport {
    pub n: usize,
    pub resolution: usize,
    pub delta: f64,
    pub eta: f64,
    pub h: f64,
    /// Raw cloud, bits.
    pub raw: f64,
    pub binary: f64,
    pub count: f64,
    /// Footprint encoding, bits.
    pub proposed: f64,
    pub retention_binary: f64,
    pub retention_count: f64,
    pub retention_proposed: f64,
}

impl InfoContentReport {
    pub fn compute(n: usize, resolution: usize, delta: f64, eta: f64) -> Result<Self> {
        let raw = info_raw(n, delta)?;
        let binary = info_binary(n, resolution)?;
        let count = info_count(n, resolution)?;
        let proposed = info_proposed(n, resolution, delta, eta)?;
        let ratio = |x: f64| if raw > 0.0 { x / raw } else { 1.0 };
        Ok(Self {
            n,
            resolution,
            delta,
            eta,
            h: grid_spacing(resolution),
            raw,
            binary,
            count,
            proposed,
            retention_binary: ratio(binary),
            retention_count: ratio(count),
            retention_proposed: ratio(proposed),
        })
    }
}
