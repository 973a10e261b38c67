//! Encoding time against point count and reconstruction time against
//! resolution.
//!
//! ```bash
//! cargo run --release --example bench_scaling
//! ```

use gridenc::bench::{bench_encoding, bench_reconstruction};

fn main() -> gridenc::Result<()> {
    let enc = bench_encoding(&[10_000, 30_000, 100_000, 300_000, 1_000_000], 128, 5, 0)?;
    for (n, t) in enc.points.iter().zip(&enc.median_secs) {
        println!("N = {n:>8}  {:.3} ms", t * 1e3);
    }
    println!("exponent {:.3} (R^2 {:.4})\n", enc.exponent.slope, enc.exponent.r_squared);

    let rec = bench_reconstruction(10_000, &[128, 256, 512, 768, 1024, 1536], 5, 0)?;
    for (r, t) in rec.resolutions.iter().zip(&rec.median_secs) {
        println!("r = {r:>5}  {:.3} ms", t * 1e3);
    }
    println!(
        "r^2 term {:.3e} s (t = {:.1}, significant: {})",
        rec.r2_fit.slope,
        rec.r2_fit.t_statistic(),
        rec.has_r2_term()
    );
    Ok(())
}
