//! CSV point lists.

use std::collections::BTreeMap;
use std::path::Path;

use super::container::{CloudContainer, Rescale};
use crate::error::{Error, Result};
use crate::grid::{Dim, PointCloud, ShiftRecord};

/// Which columns hold what. Rows sharing a `sample` value form one sample, in
/// order of first appearance; without a sample column the file is one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvSchema {
    pub axes: Vec<String>,
    pub channels: Vec<String>,
    pub sample: Option<String>,
}

impl CsvSchema {
    pub fn new(axes: &[&str], channels: &[&str]) -> Self {
        Self {
            axes: axes.iter().map(|s| s.to_string()).collect(),
            channels: channels.iter().map(|s| s.to_string()).collect(),
            sample: None,
        }
    }

    pub fn with_sample_column(mut self, name: &str) -> Self {
        self.sample = Some(name.to_string());
        self
    }
}

/// How coordinates are brought into `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum RescaleMode {
    /// Keep coordinates; out-of-range clouds are flagged raw.
    #[default]
    None,
    /// Use the bounding box of the file.
    Fit,
    Given(Rescale),
}

/// Reads a headered CSV into a cloud container.
pub fn import_csv(path: impl AsRef<Path>, schema: &CsvSchema, rescale: RescaleMode) -> Result<CloudContainer> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema, rescale)
}

/// Like [`import_csv`] on any reader.
pub fn read_csv(input: impl std::io::Read, schema: &CsvSchema, rescale: RescaleMode) -> Result<CloudContainer> {
    let dim = Dim::new(schema.axes.len()).map_err(|_| {
        Error::Schema(format!("need 2 or 3 coordinate columns, got {}", schema.axes.len()))
    })?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
    };
    let axes: Vec<usize> = schema.axes.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let chans: Vec<usize> = schema.channels.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let sample_col = schema.sample.as_deref().map(col).transpose()?;

    let mut order: BTreeMap<String, usize> = BTreeMap::new();
    let mut samples: Vec<PointCloud> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>().map_err(|_| {
                Error::Schema(format!("row {}: column {:?} is not a number: {s:?}", row + 1, &headers[i]))
            })
        };
        let key = sample_col.map_or(String::new(), |i| rec.get(i).unwrap_or("").to_string());
        let next = order.len();
        let m = *order.entry(key).or_insert(next);
        if m == samples.len() {
            samples.push(PointCloud::default());
        }
        for &i in &axes {
            samples[m].coords.push(num(i)?);
        }
        for &i in &chans {
            samples[m].channels.push(num(i)?);
        }
    }
    if samples.is_empty() {
        return Err(Error::Schema("no data rows".into()));
    }
    let raw_range = samples
        .iter()
        .flat_map(|s| &s.coords)
        .any(|x| !(-1.0..=1.0).contains(x));
    let cloud = CloudContainer {
        dim,
        channels: chans.len(),
        samples,
        shift: ShiftRecord::None,
        raw_range,
        rescale: None,
    };
    match rescale {
        RescaleMode::None => Ok(cloud),
        RescaleMode::Fit => {
            let map = Rescale::fit(dim.get(), cloud.samples.iter().map(|s| s.coords.as_slice()))?;
            cloud.rescale(map)
        }
        RescaleMode::Given(map) => cloud.rescale(map),
    }
}
