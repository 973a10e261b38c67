//! Sobel edge weights and relative-L2 losses over grid batches.
//!
//! Grids are treated as images with rows along axis 0 and columns along axis 1;
//! `S_x` differentiates along columns. Kernels are applied as cross-correlation
//! with zero padding outside the grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Dim, GridFieldBatch, GridKind};

/// Denominator floor of the relative losses.
pub const NORM_FLOOR: f64 = 1e-6;

fn check_planar(g: &GridFieldBatch) -> Result<()> {
    if g.dim() != Dim::Two || g.channels() != 1 {
        return Err(Error::invalid(format!(
            "edge operators need a single-channel 2D grid, got {:?} with {} channels",
            g.dim(),
            g.channels()
        )));
    }
    Ok(())
}

/// Horizontal and vertical Sobel responses of one `r x r` plane.
pub fn sobel_components(plane: &[f64], r: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= r as isize || j >= r as isize {
            0.0
        } else {
            plane[i as usize * r + j as usize]
        }
    };
    // separable: [1 2 1] smoothing across the derivative direction
    let mut dcol = vec![0.0; r * r];
    let mut srow = vec![0.0; r * r];
    for i in 0..r as isize {
        for j in 0..r as isize {
            let k = i as usize * r + j as usize;
            dcol[k] = at(i, j + 1) - at(i, j - 1);
            srow[k] = at(i, j - 1) + 2.0 * at(i, j) + at(i, j + 1);
        }
    }
    let pick = |buf: &[f64], i: isize, j: usize| -> f64 {
        if i < 0 || i >= r as isize {
            0.0
        } else {
            buf[i as usize * r + j]
        }
    };
    let mut gx = vec![0.0; r * r];
    let mut gy = vec![0.0; r * r];
    for i in 0..r as isize {
        for j in 0..r {
            let k = i as usize * r + j;
            gx[k] = pick(&dcol, i - 1, j) + 2.0 * pick(&dcol, i, j) + pick(&dcol, i + 1, j);
            gy[k] = pick(&srow, i + 1, j) - pick(&srow, i - 1, j);
        }
    }
    (gx, gy)
}

/// `sqrt(G_x^2 + G_y^2)` per sample.
pub fn sobel_gradient_magnitude(g: &GridFieldBatch) -> Result<GridFieldBatch> {
    check_planar(g)?;
    let r = g.resolution();
    let mut out = g.clone();
    out.set_shift(None);
    out.values_mut()
        .par_chunks_mut(r * r)
        .enumerate()
        .for_each(|(m, dst)| {
            let (gx, gy) = sobel_components(g.channel(m, 0), r);
            for ((d, x), y) in dst.iter_mut().zip(gx).zip(gy) {
                *d = x.hypot(y);
            }
        });
    Ok(out)
}

/// Per-vertex loss multipliers in `[1, 3]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeightMap {
    weights: GridFieldBatch,
}

impl EdgeWeightMap {
    pub fn as_grid(&self) -> &GridFieldBatch {
        &self.weights
    }

    pub fn into_grid(self) -> GridFieldBatch {
        self.weights
    }

    pub fn sample(&self, m: usize) -> &[f64] {
        self.weights.channel(m, 0)
    }

    /// All-ones map with the layout of `like`.
    pub fn uniform(like: &GridFieldBatch) -> Result<Self> {
        check_planar(like)?;
        let mut weights = GridFieldBatch::zeros(
            Dim::Two,
            like.resolution(),
            1,
            like.samples(),
            GridKind::WeightMap,
        )?;
        weights.values_mut().fill(1.0);
        Ok(Self { weights })
    }
}

/// `Gamma = 1 + 2 |grad G| / max |grad G|`, with the maximum taken per sample.
/// A sample with no gradient gets `Gamma = 1`.
pub fn edge_weights(g_u: &GridFieldBatch) -> Result<EdgeWeightMap> {
    let mut mag = sobel_gradient_magnitude(g_u)?.with_kind(GridKind::WeightMap);
    let r = g_u.resolution();
    mag.values_mut().par_chunks_mut(r * r).for_each(|plane| {
        let max = plane.iter().copied().fold(0.0, f64::max);
        for v in plane.iter_mut() {
            *v = if max > 0.0 { 1.0 + 2.0 * *v / max } else { 1.0 };
        }
    });
    Ok(EdgeWeightMap { weights: mag })
}

fn weighted_rel_l2(
    pred: &GridFieldBatch,
    target: &GridFieldBatch,
    weights: Option<&EdgeWeightMap>,
) -> Result<f64> {
    if !pred.same_layout(target) || pred.channels() != target.channels() {
        return Err(Error::shape("prediction and target grids differ in shape"));
    }
    if let Some(w) = weights {
        if !w.weights.same_layout(pred) || pred.channels() != 1 {
            return Err(Error::shape(
                "edge weights need a single-channel prediction of the same layout",
            ));
        }
    }
    let m = pred.samples();
    let total: f64 = (0..m)
        .map(|s| {
            let p = pred.sample(s);
            let t = target.sample(s);
            let mut num = 0.0;
            let mut den = 0.0;
            for k in 0..p.len() {
                let w = weights.map_or(1.0, |w| w.sample(s)[k]);
                let e = w * (p[k] - t[k]);
                num += e * e;
                den += t[k] * t[k];
            }
            num.sqrt() / den.sqrt().max(NORM_FLOOR)
        })
        .sum();
    Ok(total / m as f64)
}

/// Edge-weighted relative L2, averaged over the samples of the batch.
pub fn edge_weighted_rel_l2(
    pred: &GridFieldBatch,
    target: &GridFieldBatch,
    weights: &EdgeWeightMap,
) -> Result<f64> {
    weighted_rel_l2(pred, target, Some(weights))
}

/// Relative L2, averaged over the samples of the batch.
pub fn rel_l2(pred: &GridFieldBatch, target: &GridFieldBatch) -> Result<f64> {
    weighted_rel_l2(pred, target, None)
}

/// Global relative L2 over stacked point-wise responses of all samples.
pub fn pointwise_rel_l2(pred: &[Vec<f64>], truth: &[Vec<f64>]) -> Result<f64> {
    if pred.len() != truth.len() || pred.iter().zip(truth).any(|(a, b)| a.len() != b.len()) {
        return Err(Error::shape("prediction and truth differ in shape"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, t) in pred.iter().zip(truth) {
        for (a, b) in p.iter().zip(t) {
            num += (b - a) * (b - a);
            den += b * b;
        }
    }
    if den == 0.0 {
        return Err(Error::invalid("truth is identically zero"));
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid(r: usize, samples: usize, values: Vec<f64>) -> GridFieldBatch {
        GridFieldBatch::from_values(Dim::Two, r, 1, samples, GridKind::Response, values).unwrap()
    }

    const SX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    const SY: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

    fn naive(plane: &[f64], r: usize, k: &[[f64; 3]; 3]) -> Vec<f64> {
        let mut out = vec![0.0; r * r];
        for i in 0..r as isize {
            for j in 0..r as isize {
                let mut acc = 0.0;
                for a in -1..=1isize {
                    for b in -1..=1isize {
                        let (y, x) = (i + a, j + b);
                        if y >= 0 && x >= 0 && y < r as isize && x < r as isize {
                            acc += k[(a + 1) as usize][(b + 1) as usize]
                                * plane[y as usize * r + x as usize];
                        }
                    }
                }
                out[i as usize * r + j as usize] = acc;
            }
        }
        out
    }

    #[test]
    fn constant_grid_has_no_interior_gradient_and_unit_weights() {
        let g = grid(6, 1, vec![0.0; 36]);
        assert!(sobel_gradient_magnitude(&g).unwrap().values().iter().all(|v| *v == 0.0));
        let w = edge_weights(&grid(6, 1, vec![2.5; 36])).unwrap();
        // zero padding makes the border of a non-zero constant grid an edge
        let interior = w.sample(0)[2 * 6 + 2];
        assert_eq!(interior, 1.0);
        let flat = edge_weights(&g).unwrap();
        assert!(flat.sample(0).iter().all(|v| *v == 1.0));
    }

    #[test]
    fn vertical_step_edge() {
        let r = 8;
        let vals: Vec<f64> = (0..r * r).map(|k| if k % r >= 4 { 1.0 } else { 0.0 }).collect();
        let step = grid(r, 1, vals);
        let mag = sobel_gradient_magnitude(&step).unwrap();
        for i in 1..r - 1 {
            for j in 1..r - 1 {
                let want = if j == 3 || j == 4 { 4.0 } else { 0.0 };
                assert_eq!(mag.values()[i * r + j], want, "({i}, {j})");
            }
        }
        let w = edge_weights(&step).unwrap();
        let max_mag = mag.values().iter().copied().fold(0.0, f64::max);
        for (m, g) in mag.values().iter().zip(w.sample(0)) {
            assert!((1.0..=3.0).contains(g));
            if *m == max_mag {
                assert_eq!(*g, 3.0);
            }
        }
    }

    #[test]
    fn maxima_are_per_sample() {
        let r = 5;
        let mut vals = vec![0.0; 2 * r * r];
        vals[12] = 1.0;
        vals[r * r + 12] = 100.0;
        let w = edge_weights(&grid(r, 2, vals)).unwrap();
        assert_eq!(w.sample(0), w.sample(1));
    }

    #[test]
    fn losses_basic_values() {
        let r = 4;
        let t = grid(r, 2, (0..32).map(|k| k as f64 * 0.1 + 0.5).collect());
        assert_eq!(rel_l2(&t, &t).unwrap(), 0.0);
        let twice = grid(r, 2, t.values().iter().map(|v| 2.0 * v).collect());
        assert_relative_eq!(rel_l2(&twice, &t).unwrap(), 1.0, epsilon = 1e-14);

        let zero = grid(r, 1, vec![0.0; 16]);
        let p = grid(r, 1, vec![0.5; 16]);
        let ones = EdgeWeightMap::uniform(&p).unwrap();
        // ||p|| = 0.5 * 4 = 2
        assert_relative_eq!(edge_weighted_rel_l2(&p, &zero, &ones).unwrap(), 2.0e6, max_relative = 1e-12);
        assert!(rel_l2(&p, &t).is_err());
    }

    #[test]
    fn unit_weights_reduce_to_plain_loss_bitwise() {
        let r = 7;
        let t = grid(r, 3, (0..3 * 49).map(|k| ((k * 37) % 11) as f64 * 0.3).collect());
        let p = grid(r, 3, (0..3 * 49).map(|k| ((k * 13) % 7) as f64 * 0.4).collect());
        let ones = EdgeWeightMap::uniform(&p).unwrap();
        assert_eq!(
            edge_weighted_rel_l2(&p, &t, &ones).unwrap().to_bits(),
            rel_l2(&p, &t).unwrap().to_bits()
        );
    }

    #[test]
    fn pointwise_metric() {
        let truth = vec![vec![1.0, 2.0], vec![2.0]];
        assert_eq!(pointwise_rel_l2(&truth, &truth).unwrap(), 0.0);
        let zero = vec![vec![0.0, 0.0], vec![0.0]];
        assert_eq!(pointwise_rel_l2(&zero, &truth).unwrap(), 1.0);
        let pred = vec![vec![1.5, 2.0], vec![1.0]];
        // (0.25 + 0 + 1) / (1 + 4 + 4)
        assert_relative_eq!(pointwise_rel_l2(&pred, &truth).unwrap(), (1.25f64 / 9.0).sqrt());
        assert!(pointwise_rel_l2(&truth, &zero).is_err());
    }

    #[test]
    fn rejects_non_planar_input() {
        let g = GridFieldBatch::zeros(Dim::Three, 4, 1, 1, GridKind::Response).unwrap();
        assert!(sobel_gradient_magnitude(&g).is_err());
        let g = GridFieldBatch::zeros(Dim::Two, 4, 2, 1, GridKind::Response).unwrap();
        assert!(edge_weights(&g).is_err());
    }

    proptest! {
        #[test]
        fn separable_matches_naive(vals in prop::collection::vec(-5.0f64..5.0, 36)) {
            let (gx, gy) = sobel_components(&vals, 6);
            let nx = naive(&vals, 6, &SX);
            let ny = naive(&vals, 6, &SY);
            for k in 0..36 {
                prop_assert!((gx[k] - nx[k]).abs() <= 1e-12);
                prop_assert!((gy[k] - ny[k]).abs() <= 1e-12);
            }
        }

        #[test]
        fn mirror_negates_horizontal_gradient(vals in prop::collection::vec(-5.0f64..5.0, 25)) {
            let r = 5;
            let flipped: Vec<f64> = (0..r * r).map(|k| vals[(k / r) * r + (r - 1 - k % r)]).collect();
            let (gx, gy) = sobel_components(&vals, r);
            let (fx, fy) = sobel_components(&flipped, r);
            for i in 0..r {
                for j in 0..r {
                    let a = i * r + j;
                    let b = i * r + (r - 1 - j);
                    prop_assert!((gx[a] + fx[b]).abs() <= 1e-12);
                    prop_assert!((gx[a].hypot(gy[a]) - fx[b].hypot(fy[b])).abs() <= 1e-12);
                }
            }
        }
    }
}
