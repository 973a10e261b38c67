use serde::{Deserialize, Serialize};

use super::PointCloudBatch;
use crate::error::{Error, Result};

/// How responses are mapped to non-negative values before scattering.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum ResponseShift {
    /// Responses are used as given and must already be non-negative.
    #[default]
    None,
    /// Adds the same constant to every channel.
    Offset(f64),
    /// Adds `-min` per channel, with the minimum taken over the whole batch.
    AutoOffset,
    /// Maps each channel to `[0, 1]` using batch-wide minimum and maximum.
    MinMax,
    /// Like [`ResponseShift::MinMax`] but with per-sample extrema.
    MinMaxPerSample,
}

/// Parameters of an applied shift, sufficient to invert it exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum ShiftRecord {
    #[default]
    None,
    /// Per-channel additive offsets.
    Offset { offsets: Vec<f64> },
    /// `(min, max)` per channel, one group per sample when `per_sample` is set
    /// and a single group otherwise. Laid out `[group][channel]`.
    MinMax {
        per_sample: bool,
        channels: usize,
        ranges: Vec<(f64, f64)>,
    },
}

impl ShiftRecord {
    /// Fits the shift parameters to the responses of `cloud`.
    pub fn fit(shift: ResponseShift, cloud: &PointCloudBatch) -> Self {
        let c = cloud.channels();
        let extrema = |samples: &mut dyn Iterator<Item = &[f64]>| {
            let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); c];
            for block in samples {
                for u in block.chunks_exact(c) {
                    for (r, &v) in ranges.iter_mut().zip(u) {
                        r.0 = r.0.min(v);
                        r.1 = r.1.max(v);
                    }
                }
            }
            ranges
        };
        let mut all = cloud.samples().iter().map(|s| s.channels.as_slice());
        match shift {
            ResponseShift::None => ShiftRecord::None,
            ResponseShift::Offset(o) => ShiftRecord::Offset {
                offsets: vec![o; c],
            },
            ResponseShift::AutoOffset => ShiftRecord::Offset {
                offsets: extrema(&mut all).into_iter().map(|(lo, _)| -lo).collect(),
            },
            ResponseShift::MinMax => ShiftRecord::MinMax {
                per_sample: false,
                channels: c,
                ranges: extrema(&mut all),
            },
            ResponseShift::MinMaxPerSample => ShiftRecord::MinMax {
                per_sample: true,
                channels: c,
                ranges: cloud
                    .samples()
                    .iter()
                    .flat_map(|s| extrema(&mut std::iter::once(s.channels.as_slice())))
                    .collect(),
            },
        }
    }

    fn range(&self, sample: usize, channel: usize) -> (f64, f64) {
        match self {
            ShiftRecord::MinMax {
                per_sample,
                channels,
                ranges,
            } => {
                let g = if *per_sample { sample } else { 0 };
                ranges[g * channels + channel]
            }
            _ => unreachable!("range() is only called for min-max records"),
        }
    }

    #[inline]
    fn span(lo: f64, hi: f64) -> f64 {
        let s = hi - lo;
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    #[inline]
    pub fn forward(&self, value: f64, sample: usize, channel: usize) -> f64 {
        match self {
            ShiftRecord::None => value,
            ShiftRecord::Offset { offsets } => value + offsets[channel],
            ShiftRecord::MinMax { .. } => {
                let (lo, hi) = self.range(sample, channel);
                (value - lo) / Self::span(lo, hi)
            }
        }
    }

    #[inline]
    pub fn inverse(&self, value: f64, sample: usize, channel: usize) -> f64 {
        match self {
            ShiftRecord::None => value,
            ShiftRecord::Offset { offsets } => value - offsets[channel],
            ShiftRecord::MinMax { .. } => {
                let (lo, hi) = self.range(sample, channel);
                lo + value * Self::span(lo, hi)
            }
        }
    }

    /// Checks that the record matches a batch of `samples` x `channels`.
    pub fn check_shape(&self, samples: usize, channels: usize) -> Result<()> {
        let ok = match self {
            ShiftRecord::None => true,
            ShiftRecord::Offset { offsets } => offsets.len() == channels,
            ShiftRecord::MinMax {
                per_sample,
                channels: c,
                ranges,
            } => {
                *c == channels
                    && ranges.len() == if *per_sample { samples * channels } else { channels }
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::shape(format!(
                "shift record does not fit {samples} samples x {channels} channels"
            )))
        }
    }

    /// Shifted responses per sample, rejecting any sample left with a negative value.
    pub(crate) fn apply(&self, cloud: &PointCloudBatch) -> Result<Vec<Vec<f64>>> {
        let c = cloud.channels();
        let mut bad = Vec::new();
        let shifted: Vec<Vec<f64>> = cloud
            .samples()
            .iter()
            .enumerate()
            .map(|(m, s)| {
                let out: Vec<f64> = s
                    .channels
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| self.forward(v, m, k % c))
                    .collect();
                if out.iter().any(|v| !(*v >= 0.0)) {
                    bad.push(m);
                }
                out
            })
            .collect();
        if bad.is_empty() {
            Ok(shifted)
        } else {
            Err(Error::NegativeResponse { samples: bad })
        }
    }
}
