mod common;

use common::*;
use gridenc::io::{synth_dataset, SynthKind};
use gridenc::recovery::{
    chamfer, chamfer_single, complement_grid, make_partial, recover_and_evaluate, recover_points,
    NearestNeighbors,
};
use gridenc::{encode_response, encode_topology, Dim, GridFieldBatch, GridKind, ResponseShift};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chamfer_properties(seed in any::<u64>(), n in 1usize..60, k in 1usize..60, three in any::<bool>()) {
        let d = if three { 3 } else { 2 };
        let dim = if three { Dim::Three } else { Dim::Two };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_coords(&mut rng, n, d);
        let y = random_coords(&mut rng, k, d);
        let a = chamfer(&[x.clone()], &[y.clone()], dim).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - chamfer(&[y.clone()], &[x.clone()], dim).unwrap()).abs() <= 1e-12);
        prop_assert!((a - chamfer_oracle(&x, &y, d)).abs() <= 1e-12);
        // a permutation is the same multiset
        let mut perm: Vec<&[f64]> = x.chunks(d).collect();
        perm.reverse();
        let px: Vec<f64> = perm.concat();
        prop_assert_eq!(chamfer(&[x.clone()], &[px], dim).unwrap(), 0.0);
    }
}

#[test]
fn bucketed_chamfer_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for d in [2usize, 3] {
        // clustered data stresses the bucket sizing
        let x: Vec<f64> = (0..7000 * d).map(|i| if i % 3 == 0 { rng.random_range(-0.1..0.1) } else { rng.random_range(-1.0..=1.0) }).collect();
        let y = random_coords(&mut rng, 6000, d);
        let fast = chamfer_single(&x, &y, d).unwrap();
        let brute = chamfer_oracle(&x, &y, d);
        assert!((fast - brute).abs() <= 1e-12, "{fast} vs {brute}");
        let nn = NearestNeighbors::new(&x, d).unwrap();
        let bf = NearestNeighbors::brute(&x, d);
        for q in y.chunks(d).take(1000) {
            assert_eq!(nn.nearest(q), bf.nearest(q));
        }
    }
}

#[test]
fn chamfer_bound_at_matching_dense_lattice() {
    let cloud = synth_dataset(SynthKind::AirfoilLike, Dim::Two, 1, 2000, 11).unwrap();
    let p = make_partial(&cloud, 0.3, 2).unwrap();
    for r in [32usize, 64, 128] {
        let g_o = encode_topology(&cloud, r).unwrap();
        let g_u = encode_response(&cloud, r, ResponseShift::None).unwrap();
        let res = recover_and_evaluate(&cloud, &p, &g_o, &g_u, r).unwrap();
        let h = 2.0 / (r as f64 - 1.0);
        assert!(res.chamfer <= 4.0 * h * h, "{} at r={r}", res.chamfer);
        assert_eq!(res.recovered[0].len(), 2 * 2000);
    }
}

#[test]
fn noisy_prediction_is_clamped() {
    let cloud = random_cloud(3, 1000, Dim::Two, 0);
    let p = make_partial(&cloud, 0.4, 0).unwrap();
    let full = encode_topology(&cloud, 32).unwrap();
    let part = encode_topology(&p.known, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noisy: Vec<f64> = full.values().iter().map(|v| (v + rng.random_range(-0.01..0.01)).max(0.0)).collect();
    let noisy = GridFieldBatch::from_values(Dim::Two, 32, 1, 1, GridKind::Topology, noisy).unwrap();
    let gc = complement_grid(&noisy, &part).unwrap();
    assert!(gc.values().iter().all(|v| *v >= 0.0));
    // clamping only removes noise-sized mass from empty vertices
    let missing = 400.0;
    assert!((gc.sums()[0][0] - missing).abs() < 0.01 * 1024.0, "{}", gc.sums()[0][0]);
    let rec = recover_points(&gc, &[400], 64).unwrap();
    assert_eq!(rec.coords[0].len(), 800);
}
