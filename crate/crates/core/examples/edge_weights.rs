//! Sobel edge weights of a response grid and the weighted loss they define.
//!
//! ```bash
//! cargo run --release --example edge_weights
//! ```

use gridenc::edge::{edge_weighted_rel_l2, edge_weights, rel_l2, sobel_gradient_magnitude, EdgeWeightMap};
use gridenc::io::{synth_dataset, SynthKind};
use gridenc::{encode_response, Dim, ResponseShift};

fn main() -> gridenc::Result<()> {
    let cloud = synth_dataset(SynthKind::AirfoilLike, Dim::Two, 2, 4000, 3)?;
    let r = 64;
    let g_u = encode_response(&cloud, r, ResponseShift::None)?;

    let mag = sobel_gradient_magnitude(&g_u)?;
    let w = edge_weights(&g_u)?;
    let ws = w.sample(0);
    println!(
        "weights: min {:.3}, max {:.3}, mean {:.3}",
        ws.iter().copied().fold(f64::INFINITY, f64::min),
        ws.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ws.iter().sum::<f64>() / ws.len() as f64
    );
    println!("largest gradient magnitude: {:.3}", mag.sample(0).iter().copied().fold(0.0, f64::max));

    // a 3x3 box blur stands in for a model output; it errs most at edges
    let mut pred = g_u.clone();
    for m in 0..g_u.samples() {
        let src = g_u.sample(m);
        let dst = pred.channel_mut(m, 0);
        for i in 0..r {
            for j in 0..r {
                let (mut acc, mut k) = (0.0, 0.0);
                for y in i.saturating_sub(1)..(i + 2).min(r) {
                    for x in j.saturating_sub(1)..(j + 2).min(r) {
                        acc += src[y * r + x];
                        k += 1.0;
                    }
                }
                dst[i * r + j] = acc / k;
            }
        }
    }
    println!("rel L2:               {:.4}", rel_l2(&pred, &g_u)?);
    println!("edge-weighted rel L2: {:.4}", edge_weighted_rel_l2(&pred, &g_u, &w)?);
    println!("uniform weights:      {:.4}", edge_weighted_rel_l2(&pred, &g_u, &EdgeWeightMap::uniform(&g_u)?)?);
    Ok(())
}
