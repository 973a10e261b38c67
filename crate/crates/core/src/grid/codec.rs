use rayon::prelude::*;

use super::footprint::{gather_streaming, scatter_topology_streaming, scatter_values_streaming};
use super::{GridFieldBatch, GridKind, PointCloudBatch, ResponseShift, ShiftRecord};
use crate::error::{Error, Result};

/// Added to the topology grid before normalizing. Fixed.
pub const STABILIZER: f64 = 1e-6;

/// Topology grid `G_o`: each point scatters its unit footprint onto the
/// vertices of its enclosing cell. Per-sample mass equals the point count.
pub fn encode_topology(cloud: &PointCloudBatch, resolution: usize) -> Result<GridFieldBatch> {
    scatter_topology_streaming(cloud, resolution)
}

/// Response grid `G_u`: footprint-weighted responses, after `shift` makes
/// them non-negative. The applied shift is stored on the returned grid.
pub fn encode_response(
    cloud: &PointCloudBatch,
    resolution: usize,
    shift: ResponseShift,
) -> Result<GridFieldBatch> {
    if cloud.channels() == 0 {
        return Err(Error::invalid("response encoding needs at least one channel"));
    }
    let record = ShiftRecord::fit(shift, cloud);
    let shifted = record.apply(cloud)?;
    let mut grid = scatter_values_streaming(cloud, resolution, &shifted, cloud.channels())?;
    grid.set_shift(Some(record));
    Ok(grid)
}

/// `H = G_u / (G_o + 1e-6)`, with the single topology channel broadcast over
/// the response channels.
pub fn normalize_grid(g_u: &GridFieldBatch, g_o: &GridFieldBatch) -> Result<GridFieldBatch> {
    if g_o.kind() != GridKind::Topology {
        return Err(Error::invalid(format!(
            "normalizer must be a topology grid, got {:?}",
            g_o.kind()
        )));
    }
    if !g_u.same_layout(g_o) || g_o.channels() != 1 {
        return Err(Error::shape(format!(
            "response grid ({:?}, r={}, M={}, c={}) vs topology grid ({:?}, r={}, M={}, c={})",
            g_u.dim(),
            g_u.resolution(),
            g_u.samples(),
            g_u.channels(),
            g_o.dim(),
            g_o.resolution(),
            g_o.samples(),
            g_o.channels()
        )));
    }
    let v = g_u.vertices();
    let c = g_u.channels();
    let mut h = g_u.clone().with_kind(GridKind::Normalized);
    h.values_mut()
        .par_chunks_mut(v * c)
        .enumerate()
        .for_each(|(m, out)| {
            let o = g_o.channel(m, 0);
            for plane in out.chunks_exact_mut(v) {
                for (x, &w) in plane.iter_mut().zip(o) {
                    *x /= w + STABILIZER;
                }
            }
        });
    Ok(h)
}

/// Point-wise responses at `coords` from a topology/response grid pair.
///
/// Always reads the `2^d` enclosing vertices of each point, including ones
/// where `G_o` is zero. A shift recorded on `g_u` is inverted. Returns one
/// `N_m x c` block per sample.
pub fn reconstruct(
    g_o: &GridFieldBatch,
    g_u: &GridFieldBatch,
    coords: &PointCloudBatch,
) -> Result<Vec<Vec<f64>>> {
    if coords.dim() != g_u.dim() || coords.len() != g_u.samples() {
        return Err(Error::shape(format!(
            "cloud ({:?}, M={}) does not match grids ({:?}, M={})",
            coords.dim(),
            coords.len(),
            g_u.dim(),
            g_u.samples()
        )));
    }
    let h = normalize_grid(g_u, g_o)?;
    let mut out = gather_streaming(coords, &h)?;
    if let Some(shift) = g_u.shift() {
        let c = g_u.channels();
        shift.check_shape(g_u.samples(), c)?;
        if *shift != ShiftRecord::None {
            out.par_iter_mut().enumerate().for_each(|(m, block)| {
                for (k, v) in block.iter_mut().enumerate() {
                    *v = shift.inverse(*v, m, k % c);
                }
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Dim, PointCloud};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coord(i: f64, r: usize) -> f64 {
        2.0 * i / (r - 1) as f64 - 1.0
    }

    /// Per-vertex hat-function sum, independent of the footprint path.
    fn oracle(points: &[[f64; 2]], values: &[f64], r: usize) -> Vec<f64> {
        let mut g = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                for (p, u) in points.iter().zip(values) {
                    let ix = (p[0] + 1.0) * 0.5 * (r - 1) as f64;
                    let iy = (p[1] + 1.0) * 0.5 * (r - 1) as f64;
                    let wx = (1.0 - (ix - i as f64).abs()).max(0.0);
                    let wy = (1.0 - (iy - j as f64).abs()).max(0.0);
                    g[i * r + j] += wx * wy * u;
                }
            }
        }
        g
    }

    #[test]
    fn three_point_configuration() {
        // r = 4: points 1 and 2 sit in the cell whose top-right vertex is (1, 1),
        // point 3 in the cell whose bottom-left vertex is (1, 1).
        let r = 4;
        let idx = [[0.3, 0.6], [0.8, 0.25], [1.4, 1.1]];
        let pts: Vec<f64> = idx.iter().flat_map(|p| [coord(p[0], r), coord(p[1], r)]).collect();
        let cloud = PointCloudBatch::from_coords(Dim::Two, vec![pts]).unwrap();
        let g = encode_topology(&cloud, r).unwrap();
        let rt = |p: [f64; 2]| p[0] * p[1];
        let lb = |p: [f64; 2]| (1.0 - (p[0] - 1.0)) * (1.0 - (p[1] - 1.0));
        let expected = rt(idx[0]) + rt(idx[1]) + lb(idx[2]);
        assert_relative_eq!(g.channel(0, 0)[r + 1], expected, epsilon = 1e-12);
        assert_relative_eq!(g.sums()[0][0], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn single_centered_point() {
        let cloud = PointCloudBatch::from_coords(Dim::Two, vec![vec![-0.5, 0.5]]).unwrap();
        let g = encode_topology(&cloud, 3).unwrap();
        assert_eq!(g.values(), &[0.0, 0.25, 0.25, 0.0, 0.25, 0.25, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn topology_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<[f64; 2]> = (0..10)
            .map(|_| [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)])
            .collect();
        let cloud =
            PointCloudBatch::from_coords(Dim::Two, vec![pts.iter().flatten().copied().collect()])
                .unwrap();
        let g = encode_topology(&cloud, 8).unwrap();
        let want = oracle(&pts, &[1.0; 10], 8);
        for (a, b) in g.values().iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn response_zero_and_vertex_values() {
        let cloud = PointCloudBatch::new(
            Dim::Two,
            1,
            vec![PointCloud::new(vec![0.0, 0.0, 0.3, -0.2], vec![0.0, 0.0])],
        )
        .unwrap();
        let g = encode_response(&cloud, 5, ResponseShift::None).unwrap();
        assert!(g.values().iter().all(|v| *v == 0.0));

        let cloud = PointCloudBatch::new(
            Dim::Two,
            1,
            vec![PointCloud::new(vec![0.0, -1.0], vec![7.0])],
        )
        .unwrap();
        let g = encode_response(&cloud, 5, ResponseShift::None).unwrap();
        let vertex = 2 * 5;
        for (i, v) in g.values().iter().enumerate() {
            assert_eq!(*v, if i == vertex { 7.0 } else { 0.0 });
        }
    }

    #[test]
    fn response_needs_channels_and_non_negative_values() {
        let bare = PointCloudBatch::from_coords(Dim::Two, vec![vec![0.0, 0.0]]).unwrap();
        assert!(encode_response(&bare, 4, ResponseShift::None).is_err());
        let neg = PointCloudBatch::new(
            Dim::Two,
            1,
            vec![PointCloud::new(vec![0.0, 0.0], vec![-1.0])],
        )
        .unwrap();
        assert!(matches!(
            encode_response(&neg, 4, ResponseShift::None),
            Err(Error::NegativeResponse { .. })
        ));
        let g = encode_response(&neg, 4, ResponseShift::AutoOffset).unwrap();
        let o = encode_topology(&neg, 4).unwrap();
        let back = reconstruct(&o, &g, &neg).unwrap();
        assert_relative_eq!(back[0][0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn normalize_values_and_empty_vertices() {
        let g_o = GridFieldBatch::from_values(
            Dim::Two,
            2,
            1,
            1,
            GridKind::Topology,
            vec![0.0, 1.0, 2.0, 0.5],
        )
        .unwrap();
        let g_u = GridFieldBatch::from_values(
            Dim::Two,
            2,
            1,
            1,
            GridKind::Response,
            vec![3.0, 1.0, 4.0, 0.25],
        )
        .unwrap();
        let h = normalize_grid(&g_u, &g_o).unwrap();
        assert_eq!(h.kind(), GridKind::Normalized);
        assert_eq!(h.values()[0], 3.0 / STABILIZER);
        assert_eq!(h.values()[2], 4.0 / (2.0 + STABILIZER));
        assert!(normalize_grid(&g_u, &g_u).is_err());
        let wrong = GridFieldBatch::zeros(Dim::Two, 3, 1, 1, GridKind::Topology).unwrap();
        assert!(matches!(normalize_grid(&g_u, &wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn constant_response_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400;
        let coords: Vec<f64> = (0..3 * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let cloud = PointCloudBatch::new(
            Dim::Three,
            1,
            vec![PointCloud::new(coords, vec![2.5; n])],
        )
        .unwrap();
        let g_o = encode_topology(&cloud, 9).unwrap();
        let g_u = encode_response(&cloud, 9, ResponseShift::None).unwrap();
        let rec = reconstruct(&g_o, &g_u, &cloud).unwrap();
        for v in &rec[0] {
            assert_relative_eq!(*v, 2.5, max_relative = 1e-5);
        }
    }

    #[test]
    fn reconstruct_rejects_mismatched_grids() {
        let cloud = PointCloudBatch::from_coords(Dim::Two, vec![vec![0.0, 0.0]]).unwrap();
        let g_o = encode_topology(&cloud, 4).unwrap();
        let other = GridFieldBatch::zeros(Dim::Two, 5, 1, 1, GridKind::Response).unwrap();
        assert!(reconstruct(&g_o, &other, &cloud).is_err());
        let cloud3 = PointCloudBatch::from_coords(Dim::Three, vec![vec![0.0, 0.0, 0.0]]).unwrap();
        let g_u = GridFieldBatch::zeros(Dim::Two, 4, 1, 1, GridKind::Response).unwrap();
        assert!(reconstruct(&g_o, &g_u, &cloud3).is_err());
    }
}
