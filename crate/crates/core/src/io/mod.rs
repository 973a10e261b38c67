//! Containers, CSV ingestion and synthetic data.

pub mod container;
pub mod csv;
pub mod synth;

pub use container::{
    read_cloud, read_grid, write_cloud, write_grid, CloudContainer, Precision, Rescale,
    WriteOptions,
};
pub use csv::{import_csv, read_csv, CsvSchema, RescaleMode};
pub use synth::{add_coordinate_noise, synth_dataset, SynthKind};
