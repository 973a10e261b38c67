use rayon::prelude::*;

use super::{check_resolution, Dim, GridFieldBatch, GridKind, PointCloudBatch};
use crate::error::{Error, Result};

/// Maps a scaled coordinate in `[-1, 1]` to continuous grid-index space `[0, r - 1]`.
pub fn to_grid_index(coord: f64, resolution: usize) -> Result<f64> {
    check_resolution(resolution)?;
    if !(-1.0..=1.0).contains(&coord) {
        return Err(Error::invalid(format!(
            "coordinate {coord} lies outside [-1, 1]"
        )));
    }
    Ok(grid_index(coord, resolution))
}

#[inline]
fn grid_index(coord: f64, resolution: usize) -> f64 {
    (coord + 1.0) / 2.0 * (resolution - 1) as f64
}

/// The `2^d` vertex weights one point contributes to its enclosing cell.
///
/// Corner `k` of the cell is the vertex whose offset along axis `a` is bit `a`
/// of `k`; its weight is the product over axes of `offset[a]` (high side) or
/// `1 - offset[a]` (low side). Unused trailing entries are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Footprint {
    /// Low vertex index per axis, in `[0, r - 2]`.
    pub base: [usize; 3],
    /// Fractional position inside the cell per axis, in `[0, 1]`.
    pub offset: [f64; 3],
    pub weights: [f64; 8],
}

impl Footprint {
    /// Footprint of an in-range point. The base vertex is clamped to `r - 2` so
    /// a coordinate of exactly `1` puts its full weight on the last vertex.
    pub fn of_point(point: &[f64], resolution: usize) -> Self {
        let d = point.len();
        let mut base = [0usize; 3];
        let mut offset = [0.0f64; 3];
        let top = (resolution - 2) as f64;
        for a in 0..d {
            let idx = grid_index(point[a], resolution);
            let b = idx.floor().clamp(0.0, top);
            base[a] = b as usize;
            offset[a] = idx - b;
        }
        let mut weights = [0.0f64; 8];
        for (k, w) in weights.iter_mut().enumerate().take(1 << d) {
            *w = (0..d).fold(1.0, |acc, a| {
                acc * if k >> a & 1 == 1 {
                    offset[a]
                } else {
                    1.0 - offset[a]
                }
            });
        }
        Footprint {
            base,
            offset,
            weights,
        }
    }

    /// Flat vertex offset (within one channel) of cell corner `k`.
    #[inline]
    pub fn vertex(&self, corner: usize, dim: Dim, resolution: usize) -> usize {
        let mut flat = 0;
        for a in 0..dim.get() {
            flat = flat * resolution + self.base[a] + (corner >> a & 1);
        }
        flat
    }

    #[inline]
    pub(crate) fn corners(&self, dim: Dim, resolution: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..dim.corners()).map(move |k| (self.vertex(k, dim, resolution), self.weights[k]))
    }
}

/// Footprints of every point of a batch at a fixed resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct FootprintTable {
    dim: Dim,
    resolution: usize,
    samples: Vec<Vec<Footprint>>,
}

/// Computes the footprint table of a validated cloud.
pub fn footprint(cloud: &PointCloudBatch, resolution: usize) -> Result<FootprintTable> {
    check_resolution(resolution)?;
    let d = cloud.dim().get();
    let samples = cloud
        .samples()
        .par_iter()
        .map(|s| {
            s.coords
                .chunks_exact(d)
                .map(|p| Footprint::of_point(p, resolution))
                .collect()
        })
        .collect();
    Ok(FootprintTable {
        dim: cloud.dim(),
        resolution,
        samples,
    })
}

impl FootprintTable {
    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn samples(&self) -> &[Vec<Footprint>] {
        &self.samples
    }

    pub fn sample(&self, m: usize) -> &[Footprint] {
        &self.samples[m]
    }

    fn vertices(&self) -> usize {
        self.resolution.pow(self.dim.get() as u32)
    }

    /// Scatters unit mass per point. Accumulation runs in point order within a
    /// sample; samples are processed in parallel.
    pub fn scatter_topology(&self) -> GridFieldBatch {
        let mut grid = GridFieldBatch::zeros(
            self.dim,
            self.resolution,
            1,
            self.samples.len(),
            GridKind::Topology,
        )
        .expect("table resolution is validated");
        let v = self.vertices();
        grid.values_mut()
            .par_chunks_mut(v)
            .zip(self.samples.par_iter())
            .for_each(|(out, fps)| {
                for fp in fps {
                    for (i, w) in fp.corners(self.dim, self.resolution) {
                        out[i] += w;
                    }
                }
            });
        grid
    }

    /// Scatters `weight * value` per point and channel. `values[m]` is an
    /// `N_m x c` row-major block.
    pub fn scatter_values(&self, values: &[Vec<f64>], channels: usize) -> Result<GridFieldBatch> {
        if values.len() != self.samples.len() {
            return Err(Error::shape(format!(
                "{} value blocks for {} samples",
                values.len(),
                self.samples.len()
            )));
        }
        for (m, (vals, fps)) in values.iter().zip(&self.samples).enumerate() {
            if vals.len() != fps.len() * channels {
                return Err(Error::shape(format!(
                    "sample {m}: {} values for {} points x {channels} channels",
                    vals.len(),
                    fps.len()
                )));
            }
        }
        let mut grid = GridFieldBatch::zeros(
            self.dim,
            self.resolution,
            channels,
            self.samples.len(),
            GridKind::Response,
        )?;
        let v = self.vertices();
        grid.values_mut()
            .par_chunks_mut(v * channels)
            .zip(self.samples.par_iter().zip(values.par_iter()))
            .for_each(|(out, (fps, vals))| {
                for (fp, u) in fps.iter().zip(vals.chunks_exact(channels)) {
                    for (i, w) in fp.corners(self.dim, self.resolution) {
                        for (c, &uc) in u.iter().enumerate() {
                            out[c * v + i] += w * uc;
                        }
                    }
                }
            });
        Ok(grid)
    }

    /// Multilinear gather of every channel of `grid` at the table's points.
    /// Returns one `N_m x c` block per sample.
    pub fn gather(&self, grid: &GridFieldBatch) -> Result<Vec<Vec<f64>>> {
        if grid.dim() != self.dim
            || grid.resolution() != self.resolution
            || grid.samples() != self.samples.len()
        {
            return Err(Error::shape(format!(
                "grid ({:?}, r={}, M={}) does not match footprints ({:?}, r={}, M={})",
                grid.dim(),
                grid.resolution(),
                grid.samples(),
                self.dim,
                self.resolution,
                self.samples.len()
            )));
        }
        let c = grid.channels();
        let v = self.vertices();
        Ok(self
            .samples
            .par_iter()
            .enumerate()
            .map(|(m, fps)| {
                let g = grid.sample(m);
                let mut out = Vec::with_capacity(fps.len() * c);
                for fp in fps {
                    for ch in 0..c {
                        let plane = &g[ch * v..(ch + 1) * v];
                        out.push(fp.corners(self.dim, self.resolution).map(|(i, w)| w * plane[i]).sum());
                    }
                }
                out
            })
            .collect())
    }
}

/// Topology scatter computing each footprint on the fly; same arithmetic and
/// order as [`FootprintTable::scatter_topology`] without the per-point table.
pub(crate) fn scatter_topology_streaming(cloud: &PointCloudBatch, resolution: usize) -> Result<GridFieldBatch> {
    let dim = cloud.dim();
    let d = dim.get();
    let mut grid = GridFieldBatch::zeros(dim, resolution, 1, cloud.len(), GridKind::Topology)?;
    let v = grid.vertices();
    grid.values_mut()
        .par_chunks_mut(v)
        .zip(cloud.samples().par_iter())
        .for_each(|(out, s)| {
            for p in s.coords.chunks_exact(d) {
                let fp = Footprint::of_point(p, resolution);
                for (i, w) in fp.corners(dim, resolution) {
                    out[i] += w;
                }
            }
        });
    Ok(grid)
}

/// Streaming counterpart of [`FootprintTable::scatter_values`]. `values[m]`
/// must already match the point count of sample `m` times `channels`.
pub(crate) fn scatter_values_streaming(
    cloud: &PointCloudBatch,
    resolution: usize,
    values: &[Vec<f64>],
    channels: usize,
) -> Result<GridFieldBatch> {
    let dim = cloud.dim();
    let d = dim.get();
    let mut grid = GridFieldBatch::zeros(dim, resolution, channels, cloud.len(), GridKind::Response)?;
    let v = grid.vertices();
    grid.values_mut()
        .par_chunks_mut(v * channels)
        .zip(cloud.samples().par_iter().zip(values.par_iter()))
        .for_each(|(out, (s, vals))| {
            for (p, u) in s.coords.chunks_exact(d).zip(vals.chunks_exact(channels)) {
                let fp = Footprint::of_point(p, resolution);
                for (i, w) in fp.corners(dim, resolution) {
                    for (c, &uc) in u.iter().enumerate() {
                        out[c * v + i] += w * uc;
                    }
                }
            }
        });
    Ok(grid)
}

/// Streaming counterpart of [`FootprintTable::gather`] at the points of `cloud`.
pub(crate) fn gather_streaming(cloud: &PointCloudBatch, grid: &GridFieldBatch) -> Result<Vec<Vec<f64>>> {
    if grid.dim() != cloud.dim() || grid.samples() != cloud.len() {
        return Err(Error::shape(format!(
            "grid ({:?}, M={}) does not match cloud ({:?}, M={})",
            grid.dim(),
            grid.samples(),
            cloud.dim(),
            cloud.len()
        )));
    }
    let (dim, r, c, v) = (grid.dim(), grid.resolution(), grid.channels(), grid.vertices());
    let d = dim.get();
    Ok(cloud
        .samples()
        .par_iter()
        .enumerate()
        .map(|(m, s)| {
            let g = grid.sample(m);
            let mut out = Vec::with_capacity(s.coords.len() / d * c);
            for p in s.coords.chunks_exact(d) {
                let fp = Footprint::of_point(p, r);
                for ch in 0..c {
                    let plane = &g[ch * v..(ch + 1) * v];
                    out.push(fp.corners(dim, r).map(|(i, w)| w * plane[i]).sum());
                }
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_index_endpoints_and_midpoint() {
        assert_eq!(to_grid_index(-1.0, 128).unwrap(), 0.0);
        assert_eq!(to_grid_index(1.0, 128).unwrap(), 127.0);
        assert_eq!(to_grid_index(0.0, 4).unwrap(), 1.5);
        assert!(to_grid_index(1.0000001, 4).is_err());
        assert!(to_grid_index(0.0, 1).is_err());
    }

    // coordinate whose continuous index is `i` at resolution `r`
    fn coord(i: f64, r: usize) -> f64 {
        2.0 * i / (r - 1) as f64 - 1.0
    }

    #[test]
    fn cell_center_splits_evenly() {
        let r = 4;
        let fp = Footprint::of_point(&[coord(1.5, r), coord(1.5, r)], r);
        assert_eq!(&fp.base[..2], &[1, 1]);
        for w in &fp.weights[..4] {
            assert_relative_eq!(*w, 0.25, epsilon = 1e-15);
        }
        let fp = Footprint::of_point(&[0.0, 0.0, 0.0], 4);
        for w in &fp.weights[..8] {
            assert_relative_eq!(*w, 0.125, epsilon = 1e-15);
        }
    }

    #[test]
    fn point_on_vertex_has_one_weight() {
        // r = 7 makes (2, 3) exactly representable: coords -1/3 and 0
        let r = 7;
        let fp = Footprint::of_point(&[coord(2.0, r), coord(3.0, r)], r);
        assert_eq!(&fp.base[..2], &[2, 3]);
        assert_eq!(fp.weights[0], 1.0);
        assert_eq!(&fp.weights[1..4], &[0.0, 0.0, 0.0]);
        assert_eq!(fp.vertex(0, Dim::Two, r), 2 * r + 3);
    }

    #[test]
    fn upper_boundary_clamps_base() {
        let r = 5;
        let fp = Footprint::of_point(&[1.0, -1.0], r);
        assert_eq!(&fp.base[..2], &[3, 0]);
        assert_eq!(fp.offset[0], 1.0);
        // corner 1 = high x, low y
        assert_eq!(fp.weights[1], 1.0);
        assert_eq!(fp.vertex(1, Dim::Two, r), 4 * r);
    }

    proptest! {
        #[test]
        fn weights_partition_unity(
            p in prop::collection::vec(-1.0f64..=1.0, 3),
            r in 2usize..300,
            three in any::<bool>(),
        ) {
            let d = if three { 3 } else { 2 };
            let fp = Footprint::of_point(&p[..d], r);
            let sum: f64 = fp.weights[..1 << d].iter().sum();
            prop_assert!((sum - 1.0).abs() <= 4.0 * f64::EPSILON);
            for a in 0..d {
                prop_assert!(fp.base[a] <= r - 2);
                prop_assert!((0.0..=1.0).contains(&fp.offset[a]));
            }
            for k in 0..1 << d {
                let expect = (0..d).fold(1.0, |acc, a| {
                    acc * if k >> a & 1 == 1 { fp.offset[a] } else { 1.0 - fp.offset[a] }
                });
                prop_assert!(fp.weights[k] >= 0.0);
                prop_assert_eq!(fp.weights[k], expect);
            }
        }
    }
}
