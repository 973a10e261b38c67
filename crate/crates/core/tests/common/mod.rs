//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use gridenc::{Dim, PointCloud, PointCloudBatch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hat-function scatter: every vertex sums `prod_a max(0, 1 - |idx_a - i_a|)`
/// times the value over every point. `values` is `N x c`; the result is
/// `c x r^d` row-major.
pub fn scatter_oracle(coords: &[f64], values: &[f64], c: usize, d: usize, r: usize) -> Vec<f64> {
    let n = coords.len() / d;
    let verts = r.pow(d as u32);
    let mut out = vec![0.0; c * verts];
    for v in 0..verts {
        let mut idx = [0usize; 3];
        let mut rest = v;
        for a in (0..d).rev() {
            idx[a] = rest % r;
            rest /= r;
        }
        for p in 0..n {
            let mut w = 1.0;
            for a in 0..d {
                let g = (coords[p * d + a] + 1.0) * 0.5 * (r - 1) as f64;
                w *= (1.0 - (g - idx[a] as f64).abs()).max(0.0);
            }
            if w != 0.0 {
                for ch in 0..c {
                    out[ch * verts + v] += w * values[p * c + ch];
                }
            }
        }
    }
    out
}

/// Multilinear interpolation of one `r^d` plane at `p`, computed from the
/// hat functions of all vertices.
pub fn interp_oracle(plane: &[f64], p: &[f64], d: usize, r: usize) -> f64 {
    let mut acc = 0.0;
    let coords = p.to_vec();
    let w = scatter_oracle(&coords, &[1.0], 1, d, r);
    for (a, b) in w.iter().zip(plane) {
        acc += a * b;
    }
    acc
}

/// Zero-padded 3x3 cross-correlation, written as a plain double loop.
pub fn correlate3(plane: &[f64], r: usize, k: &[[f64; 3]; 3]) -> Vec<f64> {
    let mut out = vec![0.0; r * r];
    for i in 0..r as isize {
        for j in 0..r as isize {
            let mut acc = 0.0;
            for a in -1..=1isize {
                for b in -1..=1isize {
                    let (y, x) = (i + a, j + b);
                    if y >= 0 && x >= 0 && y < r as isize && x < r as isize {
                        acc += k[(a + 1) as usize][(b + 1) as usize] * plane[(y as usize) * r + x as usize];
                    }
                }
            }
            out[i as usize * r + j as usize] = acc;
        }
    }
    out
}

pub const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
pub const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

/// `O(N^2)` Chamfer distance of one pair of clouds.
pub fn chamfer_oracle(x: &[f64], y: &[f64], d: usize) -> f64 {
    let one = |a: &[f64], b: &[f64]| {
        let mut total = 0.0;
        for p in a.chunks(d) {
            let mut best = f64::INFINITY;
            for q in b.chunks(d) {
                let s: f64 = p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)).sum();
                best = best.min(s);
            }
            total += best;
        }
        total / (a.len() / d) as f64
    };
    one(x, y) + one(y, x)
}

pub fn random_coords(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<f64> {
    (0..n * d).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// One-sample cloud with `c` uniform non-negative channels.
pub fn random_cloud(seed: u64, n: usize, dim: Dim, c: usize) -> PointCloudBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = random_coords(&mut rng, n, dim.get());
    let values = (0..n * c).map(|_| rng.random_range(0.0..5.0)).collect();
    PointCloudBatch::new(dim, c, vec![PointCloud::new(coords, values)]).unwrap()
}

/// Coordinate of vertex `i` on an `r`-vertex axis.
pub fn vertex_coord(i: usize, r: usize) -> f64 {
    (-1.0 + 2.0 * i as f64 / (r - 1) as f64).clamp(-1.0, 1.0)
}
