//! `GRD1` grid and `PTC1` point-cloud containers.
//!
//! Both are little-endian, fixed-layout, and end with a CRC32 (IEEE) of the
//! payload bytes. See the README for the byte layout.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Dim, GridFieldBatch, GridKind, PointCloud, PointCloudBatch, ShiftRecord};

pub const GRID_MAGIC: [u8; 4] = *b"GRD1";
pub const CLOUD_MAGIC: [u8; 4] = *b"PTC1";
pub const VERSION: u16 = 1;

const FLAG_RAW_RANGE: u8 = 1;
const FLAG_RESCALE: u8 = 2;

/// On-disk scalar width of the payload.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl Precision {
    fn tag(self) -> u8 {
        match self {
            Precision::F32 => 0,
            Precision::F64 => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Precision::F32),
            1 => Ok(Precision::F64),
            t => Err(Error::Malformed(format!("unknown scalar tag {t}"))),
        }
    }

    pub fn size(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" => Ok(Precision::F32),
            "f64" => Ok(Precision::F64),
            _ => Err(Error::invalid(format!("precision must be f32 or f64, got {s:?}"))),
        }
    }
}

/// How values are written. In-memory data is `f64`, so `F32` output loses
/// precision and must be asked for with `allow_narrowing`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WriteOptions {
    pub precision: Precision,
    pub allow_narrowing: bool,
}

impl WriteOptions {
    pub fn narrowed_f32() -> Self {
        Self {
            precision: Precision::F32,
            allow_narrowing: true,
        }
    }

    fn check(self) -> Result<()> {
        if self.precision == Precision::F32 && !self.allow_narrowing {
            return Err(Error::NarrowingNotRequested);
        }
        Ok(())
    }
}

/// Per-axis affine map from `[lo, hi]` onto `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Rescale {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rescale {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("rescale needs one (min, max) pair per axis"));
        }
        if let Some(a) = (0..lo.len()).find(|&a| !(hi[a] > lo[a])) {
            return Err(Error::invalid(format!(
                "rescale axis {a}: max {} must exceed min {}",
                hi[a], lo[a]
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Bounding box of `coords` (`N x d`, possibly several samples).
    pub fn fit<'a>(dim: usize, coords: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for block in coords {
            for p in block.chunks_exact(dim) {
                for a in 0..dim {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        Self::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    #[inline]
    pub fn forward(&self, axis: usize, x: f64) -> f64 {
        let t = 2.0 * (x - self.lo[axis]) / (self.hi[axis] - self.lo[axis]) - 1.0;
        // pin the endpoints against rounding
        if x == self.hi[axis] {
            1.0
        } else {
            t
        }
    }

    #[inline]
    pub fn inverse(&self, axis: usize, t: f64) -> f64 {
        self.lo[axis] + (t + 1.0) * 0.5 * (self.hi[axis] - self.lo[axis])
    }
}

/// Point clouds as stored in a `PTC1` file. Coordinates may lie outside
/// `[-1, 1]` only when `raw_range` is set; such clouds must be rescaled before
/// they can become a [`PointCloudBatch`].
#[derive(Clone, Debug, PartialEq)]
pub struct CloudContainer {
    pub dim: Dim,
    pub channels: usize,
    pub samples: Vec<PointCloud>,
    pub shift: ShiftRecord,
    pub raw_range: bool,
    /// Map already applied to the stored coordinates, if any.
    pub rescale: Option<Rescale>,
}

impl CloudContainer {
    pub fn from_batch(batch: &PointCloudBatch) -> Self {
        Self {
            dim: batch.dim(),
            channels: batch.channels(),
            samples: batch.samples().to_vec(),
            shift: ShiftRecord::None,
            raw_range: false,
            rescale: None,
        }
    }

    pub fn point_counts(&self) -> Vec<usize> {
        let d = self.dim.get();
        self.samples.iter().map(|s| s.coords.len() / d).collect()
    }

    /// Applies `map` to the coordinates and clears the raw-range flag.
    pub fn rescale(mut self, map: Rescale) -> Result<Self> {
        let d = self.dim.get();
        if map.dim() != d {
            return Err(Error::shape(format!(
                "rescale has {} axes for {d}-dimensional points",
                map.dim()
            )));
        }
        if self.rescale.is_some() {
            return Err(Error::invalid("coordinates were already rescaled"));
        }
        for s in &mut self.samples {
            for p in s.coords.chunks_exact_mut(d) {
                for (a, x) in p.iter_mut().enumerate() {
                    *x = map.forward(a, *x);
                }
            }
        }
        self.raw_range = false;
        self.rescale = Some(map);
        Ok(self)
    }

    /// Validated batch for encoding.
    pub fn into_batch(self) -> Result<PointCloudBatch> {
        if self.raw_range {
            return Err(Error::invalid(
                "cloud is in raw coordinates; rescale it before encoding",
            ));
        }
        PointCloudBatch::new(self.dim, self.channels, self.samples)
    }
}

struct Writer {
    header: Vec<u8>,
    payload: Vec<u8>,
    precision: Precision,
}

impl Writer {
    fn new(magic: [u8; 4], precision: Precision) -> Self {
        let mut header = Vec::new();
        header.extend_from_slice(&magic);
        header.extend_from_slice(&VERSION.to_le_bytes());
        header.push(precision.tag());
        Self {
            header,
            payload: Vec::new(),
            precision,
        }
    }

    fn u8(&mut self, v: u8) {
        self.header.push(v);
    }

    fn u16(&mut self, v: usize, what: &str) -> Result<()> {
        let v = u16::try_from(v).map_err(|_| Error::invalid(format!("{what} {v} exceeds u16")))?;
        self.header.extend_from_slice(&v.to_le_bytes());
        Ok(())
    }

    fn u32(&mut self, v: usize, what: &str) -> Result<()> {
        let v = u32::try_from(v).map_err(|_| Error::invalid(format!("{what} {v} exceeds u32")))?;
        self.header.extend_from_slice(&v.to_le_bytes());
        Ok(())
    }

    fn f64(&mut self, v: f64) {
        self.header.extend_from_slice(&v.to_le_bytes());
    }

    fn shift(&mut self, s: &ShiftRecord) -> Result<()> {
        match s {
            ShiftRecord::None => self.u8(0),
            ShiftRecord::Offset { offsets } => {
                self.u8(1);
                self.u32(offsets.len(), "offset count")?;
                offsets.iter().for_each(|&o| self.f64(o));
            }
            ShiftRecord::MinMax {
                per_sample,
                channels,
                ranges,
            } => {
                self.u8(if *per_sample { 3 } else { 2 });
                self.u16(*channels, "shift channels")?;
                self.u32(ranges.len(), "range count")?;
                for &(lo, hi) in ranges {
                    self.f64(lo);
                    self.f64(hi);
                }
            }
        }
        Ok(())
    }

    fn values(&mut self, vals: &[f64]) {
        match self.precision {
            Precision::F64 => vals
                .iter()
                .for_each(|v| self.payload.extend_from_slice(&v.to_le_bytes())),
            Precision::F32 => vals
                .iter()
                .for_each(|&v| self.payload.extend_from_slice(&(v as f32).to_le_bytes())),
        }
    }

    fn finish(self) -> Vec<u8> {
        let crc = crc32fast::hash(&self.payload);
        let mut out = self.header;
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn open(buf: &'a [u8], magic: [u8; 4]) -> Result<(Self, Precision)> {
        let mut r = Reader { buf, pos: 0 };
        let found: [u8; 4] = r.take(4)?.try_into().expect("four bytes");
        if found != magic {
            return Err(Error::BadMagic {
                expected: magic,
                found,
            });
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let precision = Precision::from_tag(r.u8()?)?;
        Ok((r, precision))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Truncated {
                needed: self.pos.saturating_add(n),
                available: self.buf.len(),
            }),
        }
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("two bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("eight bytes")))
    }

    fn dim(&mut self) -> Result<Dim> {
        let d = self.u8()?;
        Dim::new(d as usize).map_err(|_| Error::Malformed(format!("dimension {d}")))
    }

    fn shift(&mut self) -> Result<ShiftRecord> {
        match self.u8()? {
            0 => Ok(ShiftRecord::None),
            1 => {
                let n = self.u32()? as usize;
                let offsets = (0..n).map(|_| self.f64()).collect::<Result<_>>()?;
                Ok(ShiftRecord::Offset { offsets })
            }
            mode @ (2 | 3) => {
                let channels = self.u16()? as usize;
                let n = self.u32()? as usize;
                let ranges = (0..n)
                    .map(|_| Ok((self.f64()?, self.f64()?)))
                    .collect::<Result<_>>()?;
                Ok(ShiftRecord::MinMax {
                    per_sample: mode == 3,
                    channels,
                    ranges,
                })
            }
            m => Err(Error::Malformed(format!("unknown shift mode {m}"))),
        }
    }

    /// Splits off `count` payload values plus the CRC, verifies it, and
    /// requires the buffer to end there.
    fn payload(&mut self, count: usize, precision: Precision) -> Result<Vec<f64>> {
        let bytes = count
            .checked_mul(precision.size())
            .ok_or_else(|| Error::Malformed("payload size overflows".into()))?;
        let data = self.take(bytes)?;
        let stored = self.u32()?;
        if self.pos != self.buf.len() {
            return Err(Error::Malformed(format!(
                "{} trailing bytes after checksum",
                self.buf.len() - self.pos
            )));
        }
        let computed = crc32fast::hash(data);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        Ok(match precision {
            Precision::F64 => data
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
                .collect(),
            Precision::F32 => data
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().expect("four bytes")) as f64)
                .collect(),
        })
    }
}

fn kind_tag(kind: GridKind) -> u8 {
    match kind {
        GridKind::Topology => 0,
        GridKind::Response => 1,
        GridKind::Normalized => 2,
        GridKind::WeightMap => 3,
    }
}

fn kind_from_tag(tag: u8) -> Result<GridKind> {
    Ok(match tag {
        0 => GridKind::Topology,
        1 => GridKind::Response,
        2 => GridKind::Normalized,
        3 => GridKind::WeightMap,
        t => return Err(Error::Malformed(format!("unknown grid kind {t}"))),
    })
}

pub fn grid_to_bytes(grid: &GridFieldBatch, opts: WriteOptions) -> Result<Vec<u8>> {
    opts.check()?;
    let mut w = Writer::new(GRID_MAGIC, opts.precision);
    let d = grid.dim().get();
    w.u8(d as u8);
    for _ in 0..d {
        w.u32(grid.resolution(), "resolution")?;
    }
    w.u32(grid.samples(), "sample count")?;
    w.u16(grid.channels(), "channel count")?;
    w.u8(kind_tag(grid.kind()));
    w.shift(grid.shift().unwrap_or(&ShiftRecord::None))?;
    w.values(grid.values());
    Ok(w.finish())
}

pub fn grid_from_bytes(buf: &[u8]) -> Result<GridFieldBatch> {
    let (mut r, precision) = Reader::open(buf, GRID_MAGIC)?;
    let dim = r.dim()?;
    let res: Vec<usize> = (0..dim.get())
        .map(|_| r.u32().map(|v| v as usize))
        .collect::<Result<_>>()?;
    if res.iter().any(|&v| v != res[0]) {
        return Err(Error::Malformed(format!("anisotropic resolution {res:?}")));
    }
    let samples = r.u32()? as usize;
    let channels = r.u16()? as usize;
    let kind = kind_from_tag(r.u8()?)?;
    let shift = r.shift()?;
    let count = res[0]
        .checked_pow(dim.get() as u32)
        .and_then(|v| v.checked_mul(samples * channels))
        .ok_or_else(|| Error::Malformed("grid size overflows".into()))?;
    let values = r.payload(count, precision)?;
    let mut grid = GridFieldBatch::from_values(dim, res[0], channels, samples, kind, values)
        .map_err(|e| Error::Malformed(e.to_string()))?;
    if shift != ShiftRecord::None {
        shift
            .check_shape(samples, channels)
            .map_err(|e| Error::Malformed(e.to_string()))?;
        grid.set_shift(Some(shift));
    }
    Ok(grid)
}

pub fn cloud_to_bytes(cloud: &CloudContainer, opts: WriteOptions) -> Result<Vec<u8>> {
    opts.check()?;
    let d = cloud.dim.get();
    let c = cloud.channels;
    for (m, s) in cloud.samples.iter().enumerate() {
        let n = s.coords.len() / d;
        if s.coords.len() % d != 0 || s.channels.len() != n * c {
            return Err(Error::shape(format!("sample {m} has inconsistent block sizes")));
        }
    }
    let mut w = Writer::new(CLOUD_MAGIC, opts.precision);
    w.u8(d as u8);
    w.u32(cloud.samples.len(), "sample count")?;
    for n in cloud.point_counts() {
        w.u32(n, "point count")?;
    }
    w.u16(c, "channel count")?;
    let mut flags = 0;
    if cloud.raw_range {
        flags |= FLAG_RAW_RANGE;
    }
    if cloud.rescale.is_some() {
        flags |= FLAG_RESCALE;
    }
    w.u8(flags);
    w.shift(&cloud.shift)?;
    if let Some(map) = &cloud.rescale {
        if map.dim() != d {
            return Err(Error::shape("rescale record has the wrong number of axes"));
        }
        map.lo.iter().chain(&map.hi).for_each(|&v| w.f64(v));
    }
    for s in &cloud.samples {
        w.values(&s.coords);
    }
    for s in &cloud.samples {
        w.values(&s.channels);
    }
    Ok(w.finish())
}

pub fn cloud_from_bytes(buf: &[u8]) -> Result<CloudContainer> {
    let (mut r, precision) = Reader::open(buf, CLOUD_MAGIC)?;
    let dim = r.dim()?;
    let d = dim.get();
    let m = r.u32()? as usize;
    let counts: Vec<usize> = (0..m).map(|_| r.u32().map(|v| v as usize)).collect::<Result<_>>()?;
    let channels = r.u16()? as usize;
    let flags = r.u8()?;
    if flags & !(FLAG_RAW_RANGE | FLAG_RESCALE) != 0 {
        return Err(Error::Malformed(format!("unknown flags {flags:#04x}")));
    }
    let shift = r.shift()?;
    let rescale = if flags & FLAG_RESCALE != 0 {
        let lo = (0..d).map(|_| r.f64()).collect::<Result<_>>()?;
        let hi = (0..d).map(|_| r.f64()).collect::<Result<_>>()?;
        Some(Rescale::new(lo, hi).map_err(|e| Error::Malformed(e.to_string()))?)
    } else {
        None
    };
    let total: usize = counts.iter().sum();
    let values = r.payload(total * (d + channels), precision)?;
    let (coords, resp) = values.split_at(total * d);
    let mut samples = Vec::with_capacity(m);
    let (mut a, mut b) = (0, 0);
    for &n in &counts {
        samples.push(PointCloud::new(
            coords[a..a + n * d].to_vec(),
            resp[b..b + n * channels].to_vec(),
        ));
        a += n * d;
        b += n * channels;
    }
    let raw_range = flags & FLAG_RAW_RANGE != 0;
    if !raw_range {
        if let Some(x) = coords.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
            return Err(Error::Malformed(format!(
                "coordinate {x} outside [-1, 1] without the raw-range flag"
            )));
        }
    }
    Ok(CloudContainer {
        dim,
        channels,
        samples,
        shift,
        raw_range,
        rescale,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_grid(path: impl AsRef<Path>, grid: &GridFieldBatch, opts: WriteOptions) -> Result<()> {
    write_file(path.as_ref(), &grid_to_bytes(grid, opts)?)
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<GridFieldBatch> {
    grid_from_bytes(&read_file(path.as_ref())?)
}

pub fn write_cloud(path: impl AsRef<Path>, cloud: &CloudContainer, opts: WriteOptions) -> Result<()> {
    write_file(path.as_ref(), &cloud_to_bytes(cloud, opts)?)
}

pub fn read_cloud(path: impl AsRef<Path>) -> Result<CloudContainer> {
    cloud_from_bytes(&read_file(path.as_ref())?)
}
