//! Drop part of a cloud, recover the missing coordinates from the complement
//! of the topology grids and score the result.
//!
//! ```bash
//! cargo run --release --example recovery
//! ```

use gridenc::io::{synth_dataset, SynthKind};
use gridenc::recovery::{complement_grid, make_partial, recover_and_evaluate, recover_points};
use gridenc::{encode_response, encode_topology, Dim, ResponseShift};

fn main() -> gridenc::Result<()> {
    let cloud = synth_dataset(SynthKind::AirfoilLike, Dim::Two, 1, 2000, 7)?;
    let r = 128;
    let g_o = encode_topology(&cloud, r)?;
    let g_u = encode_response(&cloud, r, ResponseShift::None)?;

    println!("{:>5} {:>8} {:>11} {:>9}", "phi", "missing", "chamfer", "rel L2");
    for phi in [0.1, 0.25, 0.5, 0.75] {
        let partial = make_partial(&cloud, phi, 1)?;
        let res = recover_and_evaluate(&cloud, &partial, &g_o, &g_u, 128)?;
        println!("{phi:>5} {:>8} {:>11.3e} {:>9.4}", partial.missing_counts()[0], res.chamfer, res.rel_l2);
    }

    // the same steps by hand
    let partial = make_partial(&cloud, 0.3, 2)?;
    let g_c = complement_grid(&g_o, &encode_topology(&partial.known, r)?)?;
    println!("complement mass {:.3} for {} missing points", g_c.sums()[0][0], partial.missing_counts()[0]);
    let rec = recover_points(&g_c, &partial.missing_counts(), 128)?;
    println!("selection threshold {:.4}", rec.thresholds[0]);
    Ok(())
}
