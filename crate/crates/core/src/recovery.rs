//! Recovering withheld points from a complement topology grid.
//!
//! A partial cloud `X_p` is encoded into `G_o^p`. Given a full topology grid
//! (exact or predicted), the complement `G_o^c = G_o - G_o^p` carries the mass
//! of the missing points. Interpolating it on a dense lattice and keeping the
//! `N - N_p` largest values gives approximate coordinates for them.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::edge::pointwise_rel_l2;
use crate::error::{Error, Result};
use crate::grid::{
    encode_topology, gather_streaming, reconstruct, Dim, GridFieldBatch, GridKind, PointCloud,
    PointCloudBatch,
};

/// Reference sets at or below this size are searched exhaustively.
pub const BRUTE_FORCE_LIMIT: usize = 5000;

/// What remains of a cloud after withholding a fraction of its points.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialObservation {
    /// `X_p` and `U_p`.
    pub known: PointCloudBatch,
    /// Indices into the original samples of the kept points, ascending.
    pub kept: Vec<Vec<usize>>,
    /// Indices of the withheld points, ascending.
    pub dropped: Vec<Vec<usize>>,
    pub dropout_ratio: f64,
    pub original_counts: Vec<usize>,
}

impl PartialObservation {
    /// `N - N_p` per sample.
    pub fn missing_counts(&self) -> Vec<usize> {
        self.dropped.iter().map(Vec::len).collect()
    }
}

/// Withholds `floor(phi * N)` points of every sample, chosen uniformly without
/// replacement. Sample `m` draws from stream `m` of a generator seeded with
/// `seed`, so the selection does not depend on batch order or thread count.
pub fn make_partial(cloud: &PointCloudBatch, phi: f64, seed: u64) -> Result<PartialObservation> {
    if !(0.0..1.0).contains(&phi) {
        return Err(Error::invalid(format!("dropout ratio must lie in [0, 1), got {phi}")));
    }
    let d = cloud.dim().get();
    let c = cloud.channels();
    let mut kept = Vec::with_capacity(cloud.len());
    let mut dropped = Vec::with_capacity(cloud.len());
    let mut samples = Vec::with_capacity(cloud.len());
    for (m, s) in cloud.samples().iter().enumerate() {
        let n = cloud.num_points(m);
        let k = (phi * n as f64).floor() as usize;
        if k >= n {
            return Err(Error::invalid(format!(
                "sample {m}: dropping {k} of {n} points leaves nothing"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(m as u64);
        let mut out = vec![false; n];
        for i in index::sample(&mut rng, n, k) {
            out[i] = true;
        }
        let (drop, keep): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| out[i]);
        let coords = keep.iter().flat_map(|&i| s.coords[i * d..(i + 1) * d].iter().copied()).collect();
        let channels = keep.iter().flat_map(|&i| s.channels[i * c..(i + 1) * c].iter().copied()).collect();
        samples.push(PointCloud::new(coords, channels));
        kept.push(keep);
        dropped.push(drop);
    }
    Ok(PartialObservation {
        known: PointCloudBatch::new(cloud.dim(), c, samples)?,
        kept,
        dropped,
        dropout_ratio: phi,
        original_counts: cloud.point_counts(),
    })
}

/// `max(G_full - G_partial, 0)` element-wise.
pub fn complement_grid(full: &GridFieldBatch, partial: &GridFieldBatch) -> Result<GridFieldBatch> {
    if !full.same_layout(partial) || full.channels() != 1 || partial.channels() != 1 {
        return Err(Error::shape(
            "complement needs two single-channel topology grids of the same layout",
        ));
    }
    let values = full
        .values()
        .iter()
        .zip(partial.values())
        .map(|(a, b)| (a - b).max(0.0))
        .collect();
    GridFieldBatch::from_values(
        full.dim(),
        full.resolution(),
        1,
        full.samples(),
        GridKind::Topology,
        values,
    )
}

/// Coordinates picked from the dense lattice, with the value of the last one
/// kept in each sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveredPoints {
    /// `count x d` per sample, in decreasing order of interpolated value.
    pub coords: Vec<Vec<f64>>,
    pub thresholds: Vec<f64>,
}

/// The `k`-th of `n` evenly spaced coordinates in `[-1, 1]`, endpoints included.
fn lattice_coord(k: usize, n: usize) -> f64 {
    if k + 1 == n {
        1.0
    } else {
        -1.0 + 2.0 * k as f64 / (n - 1) as f64
    }
}

/// Every point of a `dense^d` lattice, row-major with axis 0 slowest.
pub fn dense_lattice(dim: Dim, dense: usize) -> Vec<f64> {
    let d = dim.get();
    let total = dense.pow(d as u32);
    let mut out = Vec::with_capacity(total * d);
    for flat in 0..total {
        for a in 0..d {
            let stride = dense.pow((d - 1 - a) as u32);
            out.push(lattice_coord(flat / stride % dense, dense));
        }
    }
    out
}

/// Interpolates `complement` on the dense lattice and keeps the `counts[m]`
/// largest values of sample `m`. Equal values are taken in row-major order.
pub fn recover_points(
    complement: &GridFieldBatch,
    counts: &[usize],
    dense: usize,
) -> Result<RecoveredPoints> {
    if complement.channels() != 1 {
        return Err(Error::invalid("complement grid must have one channel"));
    }
    if counts.len() != complement.samples() {
        return Err(Error::shape(format!(
            "{} counts for {} samples",
            counts.len(),
            complement.samples()
        )));
    }
    if dense < complement.resolution() {
        return Err(Error::invalid(format!(
            "dense resolution {dense} is below the grid resolution {}",
            complement.resolution()
        )));
    }
    let dim = complement.dim();
    let d = dim.get();
    let total = dense.pow(d as u32);
    for (m, &k) in counts.iter().enumerate() {
        if k == 0 || k > total {
            return Err(Error::invalid(format!(
                "sample {m}: cannot pick {k} of {total} lattice points"
            )));
        }
    }
    let lattice = dense_lattice(dim, dense);
    let query = PointCloudBatch::from_coords(dim, vec![lattice.clone(); complement.samples()])?;
    let values = gather_streaming(&query, complement)?;
    let (coords, thresholds) = values
        .par_iter()
        .zip(counts.par_iter())
        .map(|(v, &k)| {
            let mut order: Vec<usize> = (0..total).collect();
            let cmp = |a: &usize, b: &usize| v[*b].total_cmp(&v[*a]).then(a.cmp(b));
            if k < total {
                order.select_nth_unstable_by(k - 1, cmp);
            }
            order.truncate(k);
            order.sort_unstable_by(cmp);
            let pts = order.iter().flat_map(|&i| lattice[i * d..(i + 1) * d].iter().copied()).collect();
            (pts, v[order[k - 1]])
        })
        .unzip();
    Ok(RecoveredPoints { coords, thresholds })
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact nearest-neighbour search over a fixed reference set of points.
///
/// Small sets are scanned exhaustively; larger ones are bucketed on a uniform
/// grid over their bounding box and searched ring by ring. Both paths return
/// the same squared distance, and on ties the smallest index.
#[derive(Clone, Debug)]
pub struct NearestNeighbors<'a> {
    points: &'a [f64],
    dim: usize,
    buckets: Option<Buckets>,
}

#[derive(Clone, Debug)]
struct Buckets {
    lo: Vec<f64>,
    side: Vec<f64>,
    cells: usize,
    start: Vec<usize>,
    items: Vec<usize>,
}

impl<'a> NearestNeighbors<'a> {
    /// Picks the search strategy from the set size.
    pub fn new(points: &'a [f64], dim: usize) -> Result<Self> {
        if dim == 0 || points.is_empty() || points.len() % dim != 0 {
            return Err(Error::invalid("nearest-neighbour search needs a non-empty point set"));
        }
        if points.len() / dim <= BRUTE_FORCE_LIMIT {
            Ok(Self::brute(points, dim))
        } else {
            Ok(Self::bucketed(points, dim))
        }
    }

    pub fn brute(points: &'a [f64], dim: usize) -> Self {
        Self {
            points,
            dim,
            buckets: None,
        }
    }

    pub fn bucketed(points: &'a [f64], dim: usize) -> Self {
        let n = points.len() / dim;
        let cells = ((n as f64 / 2.0).powf(1.0 / dim as f64).ceil() as usize).max(1);
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points.chunks_exact(dim) {
            for a in 0..dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let side: Vec<f64> = (0..dim)
            .map(|a| ((hi[a] - lo[a]) / cells as f64).max(f64::MIN_POSITIVE))
            .collect();
        let mut b = Buckets {
            lo,
            side,
            cells,
            start: vec![0; cells.pow(dim as u32) + 1],
            items: vec![0; n],
        };
        let keys: Vec<usize> = points.chunks_exact(dim).map(|p| b.flat(&b.cell_of(p))).collect();
        for &k in &keys {
            b.start[k + 1] += 1;
        }
        for i in 1..b.start.len() {
            b.start[i] += b.start[i - 1];
        }
        let mut fill = b.start.clone();
        for (i, &k) in keys.iter().enumerate() {
            b.items[fill[k]] = i;
            fill[k] += 1;
        }
        Self {
            points,
            dim,
            buckets: Some(b),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of and squared distance to the nearest reference point.
    pub fn nearest(&self, q: &[f64]) -> (usize, f64) {
        match &self.buckets {
            None => self.scan(q, 0..self.len()),
            Some(b) => self.search(b, q),
        }
    }

    fn scan(&self, q: &[f64], range: impl Iterator<Item = usize>) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for i in range {
            let d2 = sq_dist(q, &self.points[i * self.dim..(i + 1) * self.dim]);
            if d2 < best.1 || (d2 == best.1 && i < best.0) {
                best = (i, d2);
            }
        }
        best
    }

    fn search(&self, b: &Buckets, q: &[f64]) -> (usize, f64) {
        let d = self.dim;
        let centre = b.cell_of(q);
        let mut best = (usize::MAX, f64::INFINITY);
        for ring in 0..=b.cells {
            let lo: Vec<usize> = centre.iter().map(|&c| c.saturating_sub(ring)).collect();
            let hi: Vec<usize> = centre.iter().map(|&c| (c + ring).min(b.cells - 1)).collect();
            let mut cell = lo.clone();
            loop {
                let on_shell = (0..d).any(|a| cell[a].abs_diff(centre[a]) == ring);
                if on_shell {
                    let k = b.flat(&cell);
                    let found = self.scan(q, b.items[b.start[k]..b.start[k + 1]].iter().copied());
                    if found.1 < best.1 || (found.1 == best.1 && found.0 < best.0) {
                        best = found;
                    }
                }
                // odometer over the box [lo, hi]
                let mut a = d;
                loop {
                    if a == 0 {
                        break;
                    }
                    a -= 1;
                    if cell[a] < hi[a] {
                        cell[a] += 1;
                        break;
                    }
                    cell[a] = lo[a];
                }
                if cell == lo {
                    break;
                }
            }
            // any point not yet seen lies outside the searched box
            let mut bound = f64::INFINITY;
            for a in 0..d {
                if lo[a] > 0 {
                    bound = bound.min(q[a] - (b.lo[a] + lo[a] as f64 * b.side[a]));
                }
                if hi[a] + 1 < b.cells {
                    bound = bound.min(b.lo[a] + (hi[a] + 1) as f64 * b.side[a] - q[a]);
                }
            }
            if bound == f64::INFINITY || (bound > 0.0 && best.1 < bound * bound) {
                break;
            }
        }
        best
    }
}

impl Buckets {
    fn cell_of(&self, p: &[f64]) -> Vec<usize> {
        p.iter()
            .enumerate()
            .map(|(a, &x)| {
                let c = ((x - self.lo[a]) / self.side[a]).floor();
                c.clamp(0.0, (self.cells - 1) as f64) as usize
            })
            .collect()
    }

    fn flat(&self, cell: &[usize]) -> usize {
        cell.iter().fold(0, |acc, &c| acc * self.cells + c)
    }
}

fn mean_nearest(from: &[f64], to: &NearestNeighbors, dim: usize) -> f64 {
    let n = from.len() / dim;
    let total: f64 = from
        .par_chunks_exact(dim)
        .map(|p| to.nearest(p).1)
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total / n as f64
}

/// Chamfer distance of one pair of clouds: mean squared distance from each
/// point of `x` to `y`, plus the same from `y` to `x`.
pub fn chamfer_single(x: &[f64], y: &[f64], dim: usize) -> Result<f64> {
    let nx = NearestNeighbors::new(x, dim)?;
    let ny = NearestNeighbors::new(y, dim)?;
    Ok(mean_nearest(x, &ny, dim) + mean_nearest(y, &nx, dim))
}

/// Chamfer distance averaged over samples. `x[m]` and `y[m]` are row-major
/// `N x d` coordinate blocks and may differ in length.
pub fn chamfer(x: &[Vec<f64>], y: &[Vec<f64>], dim: Dim) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::shape(format!(
            "chamfer needs matching non-empty batches, got {} and {} samples",
            x.len(),
            y.len()
        )));
    }
    let d = dim.get();
    let mut total = 0.0;
    for (a, b) in x.iter().zip(y) {
        total += chamfer_single(a, b, d)?;
    }
    Ok(total / x.len() as f64)
}

/// Outcome of a recovery run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryResult {
    /// `X~` per sample.
    pub recovered: Vec<Vec<f64>>,
    pub chamfer: f64,
    pub rel_l2: f64,
    pub thresholds: Vec<f64>,
}

/// `X~ = X_p ∪ X~_c` per sample, known points first.
pub fn combine(known: &PointCloudBatch, missing: &RecoveredPoints) -> Result<Vec<Vec<f64>>> {
    if known.len() != missing.coords.len() {
        return Err(Error::shape("known and recovered batches differ in size"));
    }
    Ok(known
        .samples()
        .iter()
        .zip(&missing.coords)
        .map(|(s, x)| {
            let mut v = s.coords.clone();
            v.extend_from_slice(x);
            v
        })
        .collect())
}

/// Scores recovered coordinates `X~` against the truth.
///
/// Responses are reconstructed at every point of `X~` from `(g_o, g_u)`, and
/// each true point takes the value at its nearest point of `X~`. Kept points
/// are members of `X~`, so they read their own reconstruction.
pub fn evaluate_recovery(
    truth: &PointCloudBatch,
    recovered: Vec<Vec<f64>>,
    thresholds: Vec<f64>,
    g_o: &GridFieldBatch,
    g_u: &GridFieldBatch,
) -> Result<RecoveryResult> {
    let m = truth.len();
    if recovered.len() != m {
        return Err(Error::shape("truth and recovered batches differ in size"));
    }
    let d = truth.dim().get();
    let c = truth.channels();
    if c == 0 || g_u.channels() != c {
        return Err(Error::shape(format!(
            "truth has {c} channels, response grid {}",
            g_u.channels()
        )));
    }
    let cloud = PointCloudBatch::from_coords(truth.dim(), recovered)?;
    let values = reconstruct(g_o, g_u, &cloud)?;
    let pred = (0..m)
        .into_par_iter()
        .map(|s| {
            let index = NearestNeighbors::new(&cloud.sample(s).coords, d)?;
            let mut u = Vec::with_capacity(truth.num_points(s) * c);
            for i in 0..truth.num_points(s) {
                let (j, _) = index.nearest(truth.point(s, i));
                u.extend_from_slice(&values[s][j * c..(j + 1) * c]);
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;
    let target: Vec<Vec<f64>> = truth.samples().iter().map(|s| s.channels.clone()).collect();
    let truth_coords: Vec<Vec<f64>> = truth.samples().iter().map(|s| s.coords.clone()).collect();
    let recovered: Vec<Vec<f64>> = cloud.into_samples().into_iter().map(|s| s.coords).collect();
    Ok(RecoveryResult {
        chamfer: chamfer(&truth_coords, &recovered, truth.dim())?,
        rel_l2: pointwise_rel_l2(&pred, &target)?,
        recovered,
        thresholds,
    })
}

/// Full pipeline from a (possibly predicted) full topology grid: complement
/// against the encoded partial cloud, recover on the dense lattice, evaluate.
pub fn recover_and_evaluate(
    truth: &PointCloudBatch,
    partial: &PartialObservation,
    g_o_full: &GridFieldBatch,
    g_u: &GridFieldBatch,
    dense: usize,
) -> Result<RecoveryResult> {
    let g_o_partial = encode_topology(&partial.known, g_o_full.resolution())?;
    let complement = complement_grid(g_o_full, &g_o_partial)?;
    let counts = partial.missing_counts();
    let missing = if counts.iter().all(|&k| k == 0) {
        RecoveredPoints {
            coords: vec![Vec::new(); truth.len()],
            thresholds: vec![f64::INFINITY; truth.len()],
        }
    } else {
        recover_points(&complement, &counts, dense)?
    };
    if partial.original_counts != truth.point_counts() {
        return Err(Error::shape("partial observation was not taken from this cloud"));
    }
    evaluate_recovery(truth, combine(&partial.known, &missing)?, missing.thresholds, g_o_full, g_u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{encode_response, ResponseShift};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_cloud(n: usize, seed: u64) -> PointCloudBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let u = coords.chunks(2).map(|p| 2.0 + p[0] * p[1]).collect();
        PointCloudBatch::new(Dim::Two, 1, vec![PointCloud::new(coords, u)]).unwrap()
    }

    fn brute_chamfer(x: &[f64], y: &[f64]) -> f64 {
        let one = |a: &[f64], b: &[f64]| {
            a.chunks(2)
                .map(|p| b.chunks(2).map(|q| sq_dist(p, q)).fold(f64::INFINITY, f64::min))
                .sum::<f64>()
                / (a.len() / 2) as f64
        };
        one(x, y) + one(y, x)
    }

    #[test]
    fn partial_sizes_and_determinism() {
        let cloud = random_cloud(100, 1);
        let p = make_partial(&cloud, 0.5, 9).unwrap();
        assert_eq!(p.known.num_points(0), 50);
        assert_eq!(p.missing_counts(), vec![50]);
        assert_eq!(p, make_partial(&cloud, 0.5, 9).unwrap());
        assert_ne!(p.dropped, make_partial(&cloud, 0.5, 10).unwrap().dropped);
        let same = make_partial(&cloud, 0.0, 9).unwrap();
        assert_eq!(same.known, cloud);
        assert!(make_partial(&cloud, 1.0, 0).is_err());
        assert!(make_partial(&cloud, -0.1, 0).is_err());
    }

    #[test]
    fn complement_of_exact_encodings() {
        let cloud = random_cloud(300, 2);
        let p = make_partial(&cloud, 0.3, 0).unwrap();
        let full = encode_topology(&cloud, 32).unwrap();
        let part = encode_topology(&p.known, 32).unwrap();
        let gc = complement_grid(&full, &part).unwrap();
        assert!((gc.sums()[0][0] - 90.0).abs() <= 1e-9 * 300.0);
        let zero = complement_grid(&part, &part).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_point_on_a_vertex_is_recovered_exactly() {
        // vertex 3 of r = 9 sits at -0.25; a dense lattice of 33 contains it
        let cloud = PointCloudBatch::from_coords(Dim::Two, vec![vec![-0.25, 0.5]]).unwrap();
        let gc = encode_topology(&cloud, 9).unwrap();
        let rec = recover_points(&gc, &[1], 33).unwrap();
        assert_eq!(rec.coords[0], vec![-0.25, 0.5]);
        assert_relative_eq!(rec.thresholds[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn full_count_returns_whole_lattice_in_row_major_ties() {
        let gc = GridFieldBatch::zeros(Dim::Two, 4, 1, 1, GridKind::Topology).unwrap();
        let rec = recover_points(&gc, &[36], 6).unwrap();
        assert_eq!(rec.coords[0], dense_lattice(Dim::Two, 6));
        assert!(recover_points(&gc, &[37], 6).is_err());
        assert!(recover_points(&gc, &[0], 6).is_err());
        assert!(recover_points(&gc, &[1], 3).is_err());
    }

    #[test]
    fn lattice_endpoints() {
        let l = dense_lattice(Dim::Three, 3);
        assert_eq!(l.len(), 81);
        assert_eq!(&l[..3], &[-1.0, -1.0, -1.0]);
        assert_eq!(&l[3..6], &[-1.0, -1.0, 0.0]);
        assert_eq!(&l[78..], &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn chamfer_small_cases() {
        let a = vec![vec![0.1, 0.2]];
        let b = vec![vec![0.4, -0.2]];
        assert_relative_eq!(chamfer(&a, &b, Dim::Two).unwrap(), 2.0 * 0.25, epsilon = 1e-15);
        assert_eq!(chamfer(&a, &a, Dim::Two).unwrap(), 0.0);
        assert!(chamfer(&a, &[vec![]], Dim::Two).is_err());
        assert!(chamfer(&[], &[], Dim::Two).is_err());
    }

    #[test]
    fn bucketed_search_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dim in [2usize, 3] {
            let pts: Vec<f64> = (0..dim * 6000).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let brute = NearestNeighbors::brute(&pts, dim);
            let grid = NearestNeighbors::bucketed(&pts, dim);
            for _ in 0..500 {
                // include queries outside the bounding box
                let q: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.5..=1.5)).collect();
                assert_eq!(brute.nearest(&q), grid.nearest(&q));
            }
        }
    }

    #[test]
    fn recovery_degenerates_to_reconstruction_without_dropout() {
        let cloud = random_cloud(400, 3);
        let p = make_partial(&cloud, 0.0, 0).unwrap();
        let g_o = encode_topology(&cloud, 16).unwrap();
        let g_u = encode_response(&cloud, 16, ResponseShift::None).unwrap();
        let res = recover_and_evaluate(&cloud, &p, &g_o, &g_u, 16).unwrap();
        let rec = reconstruct(&g_o, &g_u, &cloud).unwrap();
        let target = vec![cloud.sample(0).channels.clone()];
        assert_eq!(res.rel_l2, pointwise_rel_l2(&rec, &target).unwrap());
        assert_eq!(res.chamfer, 0.0);
    }

    #[test]
    fn constant_field_is_insensitive_to_coordinates() {
        let cloud = random_cloud(500, 4);
        let ones = vec![vec![3.0; 500]];
        let cloud = cloud.with_channels(1, ones).unwrap();
        let p = make_partial(&cloud, 0.5, 1).unwrap();
        let g_o = encode_topology(&cloud, 32).unwrap();
        let g_u = encode_response(&cloud, 32, ResponseShift::None).unwrap();
        let res = recover_and_evaluate(&cloud, &p, &g_o, &g_u, 64).unwrap();
        // only the stabilizer at sparsely covered vertices moves the values
        assert!(res.rel_l2 < 1e-2, "{}", res.rel_l2);
        assert_eq!(res.recovered[0].len(), 1000);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chamfer_is_symmetric_and_matches_oracle(
            x in prop::collection::vec(-1.0f64..1.0, 2..80),
            y in prop::collection::vec(-1.0f64..1.0, 2..80),
        ) {
            let x = x[..x.len() / 2 * 2].to_vec();
            let y = y[..y.len() / 2 * 2].to_vec();
            let a = chamfer(&[x.clone()], &[y.clone()], Dim::Two).unwrap();
            let b = chamfer(&[y.clone()], &[x.clone()], Dim::Two).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((a - brute_chamfer(&x, &y)).abs() <= 1e-12);
        }

        #[test]
        fn recovered_count_is_exact(k in 1usize..=256, seed in 0u64..100) {
            let cloud = random_cloud(50, seed);
            let gc = encode_topology(&cloud, 8).unwrap();
            let rec = recover_points(&gc, &[k], 16).unwrap();
            prop_assert_eq!(rec.coords[0].len(), 2 * k);
        }
    }
}
