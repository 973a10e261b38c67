//! Point-cloud and grid batch types plus the footprint codec.
//!
//! Coordinates live in `[-1, 1]^d`. A grid with resolution `r` has `r`
//! vertices per axis, so vertex `i` sits at `-1 + i * h` with `h = 2 / (r - 1)`.
//! Grid values are stored row-major as `(sample, channel, axis0, .., axis{d-1})`,
//! where axis 0 is `x`.

mod codec;
mod footprint;
mod shift;

pub use codec::{encode_response, encode_topology, normalize_grid, reconstruct, STABILIZER};
pub use footprint::{footprint, to_grid_index, Footprint, FootprintTable};
pub(crate) use footprint::gather_streaming;
pub use shift::{ResponseShift, ShiftRecord};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial dimension of a batch. Only planar and volumetric data are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(d: usize) -> Result<Self> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::invalid(format!("dimension must be 2 or 3, got {d}"))),
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Number of vertices of a cell, `2^d`.
    #[inline]
    pub fn corners(self) -> usize {
        1 << self.get()
    }
}

/// One sample of a point cloud: `N x d` coordinates and an optional `N x c`
/// response block, both row-major. `channels` is empty when the batch has no
/// channels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub coords: Vec<f64>,
    pub channels: Vec<f64>,
}

impl PointCloud {
    pub fn new(coords: Vec<f64>, channels: Vec<f64>) -> Self {
        Self { coords, channels }
    }

    pub fn coords_only(coords: Vec<f64>) -> Self {
        Self {
            coords,
            channels: Vec::new(),
        }
    }
}

/// A batch of `M` point clouds sharing dimension and channel count.
///
/// Construction validates that every coordinate lies in `[-1, 1]`, every
/// sample has at least one point, and channel blocks have the right length.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloudBatch {
    dim: Dim,
    channels: usize,
    samples: Vec<PointCloud>,
}

impl PointCloudBatch {
    pub fn new(dim: Dim, channels: usize, samples: Vec<PointCloud>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("a batch needs at least one sample"));
        }
        let d = dim.get();
        for (m, s) in samples.iter().enumerate() {
            if s.coords.is_empty() || s.coords.len() % d != 0 {
                return Err(Error::invalid(format!(
                    "sample {m}: coordinate block of length {} is not a non-empty multiple of {d}",
                    s.coords.len()
                )));
            }
            let n = s.coords.len() / d;
            if s.channels.len() != n * channels {
                return Err(Error::invalid(format!(
                    "sample {m}: expected {} channel values ({n} points x {channels}), found {}",
                    n * channels,
                    s.channels.len()
                )));
            }
            for (k, &v) in s.coords.iter().enumerate() {
                // written so that NaN is rejected as well
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::CoordinateOutOfRange {
                        sample: m,
                        point: k / d,
                        axis: k % d,
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            dim,
            channels,
            samples,
        })
    }

    /// Batch without response channels.
    pub fn from_coords(dim: Dim, coords: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(dim, 0, coords.into_iter().map(PointCloud::coords_only).collect())
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[PointCloud] {
        &self.samples
    }

    pub fn sample(&self, m: usize) -> &PointCloud {
        &self.samples[m]
    }

    pub fn num_points(&self, m: usize) -> usize {
        self.samples[m].coords.len() / self.dim.get()
    }

    pub fn point_counts(&self) -> Vec<usize> {
        (0..self.len()).map(|m| self.num_points(m)).collect()
    }

    pub fn point(&self, m: usize, n: usize) -> &[f64] {
        let d = self.dim.get();
        &self.samples[m].coords[n * d..(n + 1) * d]
    }

    pub fn into_samples(self) -> Vec<PointCloud> {
        self.samples
    }

    /// Replaces the response block of every sample. `channels[m]` must hold
    /// `N_m * c` values.
    pub fn with_channels(self, c: usize, channels: Vec<Vec<f64>>) -> Result<Self> {
        if channels.len() != self.samples.len() {
            return Err(Error::shape(format!(
                "{} channel blocks for {} samples",
                channels.len(),
                self.samples.len()
            )));
        }
        let dim = self.dim;
        let samples = self
            .samples
            .into_iter()
            .zip(channels)
            .map(|(s, ch)| PointCloud::new(s.coords, ch))
            .collect();
        Self::new(dim, c, samples)
    }

    /// Drops the response block, keeping coordinates.
    pub fn without_channels(&self) -> Self {
        Self {
            dim: self.dim,
            channels: 0,
            samples: self
                .samples
                .iter()
                .map(|s| PointCloud::coords_only(s.coords.clone()))
                .collect(),
        }
    }
}

/// What a grid batch holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    Topology,
    Response,
    Normalized,
    WeightMap,
}

/// `M x c x r^d` grid values.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFieldBatch {
    dim: Dim,
    resolution: usize,
    channels: usize,
    samples: usize,
    kind: GridKind,
    values: Vec<f64>,
    shift: Option<ShiftRecord>,
}

/// Tolerance on `sum(G_o) == N` when a topology grid is checked against its
/// point counts.
const TOPOLOGY_SUM_RTOL: f64 = 1e-9;

impl GridFieldBatch {
    pub fn zeros(
        dim: Dim,
        resolution: usize,
        channels: usize,
        samples: usize,
        kind: GridKind,
    ) -> Result<Self> {
        check_resolution(resolution)?;
        if channels == 0 || samples == 0 {
            return Err(Error::invalid("grid needs at least one sample and one channel"));
        }
        let len = samples * channels * resolution.pow(dim.get() as u32);
        Ok(Self {
            dim,
            resolution,
            channels,
            samples,
            kind,
            values: vec![0.0; len],
            shift: None,
        })
    }

    pub fn from_values(
        dim: Dim,
        resolution: usize,
        channels: usize,
        samples: usize,
        kind: GridKind,
        values: Vec<f64>,
    ) -> Result<Self> {
        let mut g = Self::zeros(dim, resolution, channels, samples, kind)?;
        if values.len() != g.values.len() {
            return Err(Error::shape(format!(
                "expected {} grid values, got {}",
                g.values.len(),
                values.len()
            )));
        }
        if kind == GridKind::Topology {
            if let Some(i) = values.iter().position(|v| !(*v >= 0.0)) {
                return Err(Error::invalid(format!(
                    "topology grid has negative or NaN value {} at flat index {i}",
                    values[i]
                )));
            }
        }
        g.values = values;
        Ok(g)
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn samples(&self) -> usize {
        self.samples
    }

    #[inline]
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Grid spacing `2 / (r - 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 / (self.resolution - 1) as f64
    }

    /// `r^d`.
    #[inline]
    pub fn vertices(&self) -> usize {
        self.resolution.pow(self.dim.get() as u32)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn shift(&self) -> Option<&ShiftRecord> {
        self.shift.as_ref()
    }

    pub fn set_shift(&mut self, shift: Option<ShiftRecord>) {
        self.shift = shift;
    }

    pub fn with_kind(mut self, kind: GridKind) -> Self {
        self.kind = kind;
        self
    }

    /// All channels of sample `m`.
    pub fn sample(&self, m: usize) -> &[f64] {
        let len = self.channels * self.vertices();
        &self.values[m * len..(m + 1) * len]
    }

    pub fn channel(&self, m: usize, c: usize) -> &[f64] {
        let v = self.vertices();
        let start = (m * self.channels + c) * v;
        &self.values[start..start + v]
    }

    pub fn channel_mut(&mut self, m: usize, c: usize) -> &mut [f64] {
        let v = self.vertices();
        let start = (m * self.channels + c) * v;
        &mut self.values[start..start + v]
    }

    /// Flat vertex offset of a multi-index within one channel.
    pub fn vertex_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim.get());
        idx.iter().fold(0, |acc, &i| acc * self.resolution + i)
    }

    /// Per-sample, per-channel sums, indexed `[m][c]`.
    pub fn sums(&self) -> Vec<Vec<f64>> {
        (0..self.samples)
            .map(|m| {
                (0..self.channels)
                    .map(|c| self.channel(m, c).iter().sum())
                    .collect()
            })
            .collect()
    }

    /// Checks that each sample of a topology grid sums to its point count.
    pub fn check_mass(&self, counts: &[usize]) -> Result<()> {
        if counts.len() != self.samples {
            return Err(Error::shape("point counts do not match sample count"));
        }
        for (m, (&n, s)) in counts.iter().zip(self.sums()).enumerate() {
            let total = s[0];
            if (total - n as f64).abs() > TOPOLOGY_SUM_RTOL * n.max(1) as f64 {
                return Err(Error::invalid(format!(
                    "sample {m}: topology mass {total} differs from point count {n}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn same_layout(&self, other: &GridFieldBatch) -> bool {
        self.dim == other.dim
            && self.resolution == other.resolution
            && self.samples == other.samples
    }
}

pub(crate) fn check_resolution(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::invalid(format!("resolution must be at least 2, got {r}")));
    }
    Ok(())
}
