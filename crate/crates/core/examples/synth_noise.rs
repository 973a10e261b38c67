//! Synthetic datasets and coordinate noise, and how noise moves the
//! reconstruction error.
//!
//! ```bash
//! cargo run --release --example synth_noise
//! ```

use gridenc::edge::pointwise_rel_l2;
use gridenc::io::{add_coordinate_noise, synth_dataset, SynthKind};
use gridenc::{encode_response, encode_topology, reconstruct, Dim, ResponseShift};

fn main() -> gridenc::Result<()> {
    for (kind, dim) in [
        (SynthKind::GaussianBumps, Dim::Two),
        (SynthKind::GaussianBumps, Dim::Three),
        (SynthKind::Annulus, Dim::Two),
        (SynthKind::Annulus, Dim::Three),
        (SynthKind::AirfoilLike, Dim::Two),
    ] {
        let cloud = synth_dataset(kind, dim, 8, 3000, 0)?;
        let truth: Vec<Vec<f64>> = cloud.samples().iter().map(|s| s.channels.clone()).collect();
        print!("{kind:?} {}D:", dim.get());
        for sigma in [0.0, 1e-3, 1e-2] {
            let noisy = add_coordinate_noise(&cloud, sigma, 9)?;
            let g_o = encode_topology(&noisy, 32)?;
            let g_u = encode_response(&noisy, 32, ResponseShift::None)?;
            // decode at the clean coordinates
            let back = reconstruct(&g_o, &g_u, &cloud)?;
            print!("  sigma={sigma:<6} rel L2 {:.4}", pointwise_rel_l2(&back, &truth)?);
        }
        println!();
    }
    Ok(())
}
