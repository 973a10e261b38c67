//! Information kept by binary, count and footprint grids relative to the raw
//! cloud, over a range of point counts.
//!
//! ```bash
//! cargo run --example info_content
//! ```

use gridenc::info::InfoContentReport;

fn main() -> gridenc::Result<()> {
    println!("{:>6} {:>10} {:>8} {:>8} {:>8}", "N", "H_X bits", "binary", "count", "grid");
    for n in [250, 500, 1000, 2000, 4000, 8000] {
        let rep = InfoContentReport::compute(n, 128, 1e-3, 0.01)?;
        println!(
            "{n:>6} {:>10.1} {:>7.2}% {:>7.2}% {:>7.2}%",
            rep.raw,
            100.0 * rep.retention_binary,
            100.0 * rep.retention_count,
            100.0 * rep.retention_proposed
        );
    }
    Ok(())
}
