//! Encode a point cloud onto a grid and read the responses back.
//!
//! ```bash
//! cargo run --release --example encode_reconstruct
//! ```

use gridenc::edge::pointwise_rel_l2;
use gridenc::io::{synth_dataset, SynthKind};
use gridenc::{encode_response, encode_topology, normalize_grid, reconstruct, Dim, ResponseShift};

fn main() -> gridenc::Result<()> {
    let cloud = synth_dataset(SynthKind::GaussianBumps, Dim::Two, 4, 5000, 1)?;
    let truth: Vec<Vec<f64>> = cloud.samples().iter().map(|s| s.channels.clone()).collect();

    for r in [16, 32, 64, 128] {
        let g_o = encode_topology(&cloud, r)?;
        g_o.check_mass(&cloud.point_counts())?;
        let g_u = encode_response(&cloud, r, ResponseShift::None)?;
        let back = reconstruct(&g_o, &g_u, &cloud)?;
        println!("r = {r:4}  rel L2 = {:.3e}", pointwise_rel_l2(&back, &truth)?);
    }

    // negative responses need a shift; it is recorded on the grid and undone
    let shifted = cloud.clone().with_channels(
        1,
        truth.iter().map(|u| u.iter().map(|v| v - 1.0).collect()).collect(),
    )?;
    let g_o = encode_topology(&shifted, 64)?;
    let g_u = encode_response(&shifted, 64, ResponseShift::MinMax)?;
    println!("shift record: {:?}", g_u.shift());
    let h = normalize_grid(&g_u, &g_o)?;
    println!("normalized grid range: [{:.3}, {:.3}]",
        h.values().iter().copied().fold(f64::INFINITY, f64::min),
        h.values().iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let back = reconstruct(&g_o, &g_u, &shifted)?;
    println!("first point: truth {:.4}, reconstructed {:.4}", shifted.sample(0).channels[0], back[0][0]);
    Ok(())
}
