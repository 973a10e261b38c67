//! Write and read GRD1 grid and PTC1 point containers, and import a CSV file.
//!
//! ```bash
//! cargo run --example containers
//! ```

use gridenc::io::container::{cloud_from_bytes, cloud_to_bytes, grid_from_bytes, grid_to_bytes};
use gridenc::io::{import_csv, read_cloud, write_cloud, write_grid, CloudContainer, CsvSchema, RescaleMode, WriteOptions};
use gridenc::{encode_response, Dim, ResponseShift};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("gridenc-containers-example");
    std::fs::create_dir_all(&dir)?;

    let csv = dir.join("points.csv");
    let text = "case,x,y,p\nA,0.0,0.0,1.0\nA,2.0,1.0,2.5\nA,4.0,2.0,3.0\nB,1.0,1.0,0.5\nB,3.0,0.5,1.5\n";
    std::fs::write(&csv, text)?;
    let schema = CsvSchema::new(&["x", "y"], &["p"]).with_sample_column("case");
    let cloud = import_csv(&csv, &schema, RescaleMode::Fit)?;
    println!("imported {:?} points per sample, rescale {:?}", cloud.point_counts(), cloud.rescale);

    let bytes = cloud_to_bytes(&cloud, WriteOptions::default())?;
    println!("PTC1: {} bytes, magic {:?}", bytes.len(), std::str::from_utf8(&bytes[..4])?);
    assert_eq!(cloud_from_bytes(&bytes)?, cloud);

    let path = dir.join("points.ptc");
    write_cloud(&path, &cloud, WriteOptions::default())?;
    let batch = read_cloud(&path)?.into_batch()?;
    assert_eq!(batch.dim(), Dim::Two);

    let g_u = encode_response(&batch, 16, ResponseShift::AutoOffset)?;
    let f64_bytes = grid_to_bytes(&g_u, WriteOptions::default())?;
    let f32_bytes = grid_to_bytes(&g_u, WriteOptions::narrowed_f32())?;
    println!("GRD1: {} bytes as f64, {} as f32", f64_bytes.len(), f32_bytes.len());
    let back = grid_from_bytes(&f64_bytes)?;
    assert_eq!(back, g_u);
    write_grid(dir.join("response.grd"), &g_u, WriteOptions::default())?;

    // a flipped payload bit is caught by the checksum
    let mut bad = f64_bytes.clone();
    let last = bad.len() - 10;
    bad[last] ^= 1;
    println!("corrupted read: {}", grid_from_bytes(&bad).unwrap_err());

    let raw = CloudContainer::from_batch(&batch);
    println!("round trip ok; {} samples", raw.samples.len());
    Ok(())
}
