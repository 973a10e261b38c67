//! Command-line front end. Every command prints a human summary, or one JSON
//! record per line with `--json`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bench::{bench_encoding, bench_reconstruction};
use crate::convergence::{run_convergence, ConvergenceConfig, SmoothnessCase};
use crate::edge::{edge_weights, pointwise_rel_l2};
use crate::error::{Error, Result};
use crate::grid::{encode_response, encode_topology, reconstruct, Dim, PointCloudBatch, ResponseShift};
use crate::info::InfoContentReport;
use crate::io::{
    add_coordinate_noise, import_csv, read_cloud, read_grid, synth_dataset, write_cloud, write_grid,
    CloudContainer, CsvSchema, Precision, Rescale, RescaleMode, SynthKind, WriteOptions,
};
use crate::recovery::{combine, complement_grid, evaluate_recovery, make_partial, recover_points};

#[derive(Debug, Parser)]
#[command(name = "gridenc", version, about = "Footprint grid encoding of point clouds")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Grid vertices per axis.
    #[arg(long, short = 'r', global = true, default_value_t = 128)]
    pub resolution: usize,
    /// Spatial dimension for generated data.
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: usize,
    /// Scalar type of written containers; f32 narrows.
    #[arg(long, global = true, default_value = "f64")]
    pub precision: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Primary output file.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Line-delimited JSON records on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a PTC1 cloud into topology (--output) and response grids.
    Encode {
        cloud: PathBuf,
        /// Where to write the response grid.
        #[arg(long)]
        response: Option<PathBuf>,
        /// none | auto | minmax | minmax-per-sample | offset:<value>
        #[arg(long, default_value = "none")]
        shift: String,
    },
    /// Reconstruct point-wise responses from a grid pair.
    Decode {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        response: PathBuf,
        /// Cloud whose coordinates are queried; its responses, if any, are
        /// used as the reference for the error.
        #[arg(long)]
        points: PathBuf,
    },
    /// Information content of raw, binary, count and footprint encodings.
    Info {
        #[arg(long, short = 'n', default_value_t = 2000)]
        points: usize,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
    },
    /// Interpolation-error orders of the round trip.
    Convergence {
        /// smooth | kink | holder:<gamma> | holder-derivative:<alpha>
        #[arg(long, default_value = "smooth")]
        field: String,
        #[arg(long, value_delimiter = ',', default_value = "17,33,65,129,257")]
        resolutions: Vec<usize>,
        #[arg(long, default_value_t = 9)]
        points_per_cell: usize,
        #[arg(long, default_value_t = 20_000)]
        eval_points: usize,
    },
    /// Sobel edge weights of a single-channel 2D response grid.
    Weights { grid: PathBuf },
    /// Recover withheld points from full and partial topology grids.
    Recover {
        /// Full (or predicted full) topology grid.
        #[arg(long)]
        full: PathBuf,
        /// Topology grid of the known points; encoded from --known if absent.
        #[arg(long)]
        partial: Option<PathBuf>,
        /// Response grid used to reconstruct responses at the recovered points.
        #[arg(long)]
        response: PathBuf,
        /// Known points.
        #[arg(long)]
        known: PathBuf,
        /// Points to recover per sample; defaults to the complement mass.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 128)]
        dense: usize,
        /// Full cloud with responses, for Chamfer distance and relative L2.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Withhold a random fraction of every sample.
    Partial {
        cloud: PathBuf,
        #[arg(long)]
        dropout: f64,
    },
    /// Generate a synthetic dataset.
    Synth {
        /// gaussian-bumps | annulus | airfoil-like
        #[arg(long, default_value = "gaussian-bumps")]
        kind: String,
        #[arg(long, short = 'm', default_value_t = 10)]
        samples: usize,
        #[arg(long, short = 'n', default_value_t = 2000)]
        points: usize,
    },
    /// Add Gaussian noise to coordinates.
    Noise {
        cloud: PathBuf,
        #[arg(long)]
        sigma: f64,
    },
    /// Import a CSV point list.
    Import {
        csv: PathBuf,
        /// Coordinate columns, e.g. x,y.
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        axes: Vec<String>,
        /// Response columns.
        #[arg(long, value_delimiter = ',')]
        channels: Vec<String>,
        /// Column whose value groups rows into samples.
        #[arg(long)]
        sample: Option<String>,
        /// none | fit | min0,max0,min1,max1[,min2,max2]
        #[arg(long, default_value = "none")]
        rescale: String,
    },
    /// Time encoding against N and reconstruction against r.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "10000,30000,100000,300000,1000000")]
        points: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 10_000)]
        recon_points: usize,
        #[arg(long, value_delimiter = ',', default_value = "128,256,512,768,1024,1536")]
        recon_resolutions: Vec<usize>,
    },
}

fn parse_shift(s: &str) -> Result<ResponseShift> {
    Ok(match s {
        "none" => ResponseShift::None,
        "auto" => ResponseShift::AutoOffset,
        "minmax" => ResponseShift::MinMax,
        "minmax-per-sample" => ResponseShift::MinMaxPerSample,
        _ => match s.strip_prefix("offset:").map(str::parse::<f64>) {
            Some(Ok(v)) => ResponseShift::Offset(v),
            _ => return Err(Error::invalid(format!("unknown shift {s:?}"))),
        },
    })
}

fn parse_field(s: &str) -> Result<SmoothnessCase> {
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad number in field spec {s:?}")))
    };
    match s.split_once(':') {
        None if s == "smooth" => Ok(SmoothnessCase::smooth()),
        None if s == "kink" => Ok(SmoothnessCase::kink()),
        Some(("holder", g)) => SmoothnessCase::holder(num(g)?),
        Some(("holder-derivative", a)) => SmoothnessCase::holder_derivative(num(a)?),
        _ => Err(Error::invalid(format!("unknown field {s:?}"))),
    }
}

fn parse_rescale(s: &str) -> Result<RescaleMode> {
    match s {
        "none" => Ok(RescaleMode::None),
        "fit" => Ok(RescaleMode::Fit),
        _ => {
            let v: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::invalid(format!("bad rescale {s:?}")))?;
            if v.len() % 2 != 0 {
                return Err(Error::invalid("rescale needs min,max pairs"));
            }
            let lo = v.iter().step_by(2).copied().collect();
            let hi = v.iter().skip(1).step_by(2).copied().collect();
            Ok(RescaleMode::Given(Rescale::new(lo, hi)?))
        }
    }
}

struct Ctx<'a> {
    g: &'a Global,
    opts: WriteOptions,
}

impl Ctx<'_> {
    fn emit(&self, record: &impl Serialize, human: impl FnOnce() -> String) {
        if self.g.json {
            println!("{}", serde_json::to_string(record).expect("records serialize"));
        } else {
            println!("{}", human());
        }
    }

    fn output(&self, what: &str) -> Result<&Path> {
        self.g
            .output
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("--output is required for the {what}")))
    }
}

fn load_batch(path: &Path) -> Result<PointCloudBatch> {
    read_cloud(path)?.into_batch()
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let precision: Precision = g.precision.parse()?;
    let ctx = Ctx {
        g,
        opts: WriteOptions {
            precision,
            // asking for f32 on the command line is the explicit request
            allow_narrowing: precision == Precision::F32,
        },
    };
    match &cli.command {
        Command::Encode { cloud, response, shift } => {
            let batch = load_batch(cloud)?;
            let g_o = encode_topology(&batch, g.resolution)?;
            g_o.check_mass(&batch.point_counts())?;
            write_grid(ctx.output("topology grid")?, &g_o, ctx.opts)?;
            if let Some(path) = response {
                let g_u = encode_response(&batch, g.resolution, parse_shift(shift)?)?;
                write_grid(path, &g_u, ctx.opts)?;
            }
            let rec = json!({
                "command": "encode",
                "samples": batch.len(),
                "points": batch.point_counts(),
                "resolution": g.resolution,
                "channels": batch.channels(),
            });
            ctx.emit(&rec, || {
                format!(
                    "encoded {} samples at r={}, channels: {}",
                    batch.len(),
                    g.resolution,
                    batch.channels()
                )
            });
        }
        Command::Decode { topology, response, points } => {
            let g_o = read_grid(topology)?;
            let g_u = read_grid(response)?;
            let container = read_cloud(points)?;
            let truth = container.clone().into_batch()?;
            let values = reconstruct(&g_o, &g_u, &truth.without_channels())?;
            let rel = if truth.channels() == g_u.channels() {
                let target: Vec<Vec<f64>> = truth.samples().iter().map(|s| s.channels.clone()).collect();
                pointwise_rel_l2(&values, &target).ok()
            } else {
                None
            };
            if let Some(path) = &g.output {
                let out = truth.without_channels().with_channels(g_u.channels(), values)?;
                write_cloud(path, &CloudContainer::from_batch(&out), ctx.opts)?;
            }
            let rec = json!({ "command": "decode", "samples": truth.len(), "rel_l2": rel });
            ctx.emit(&rec, || match rel {
                Some(e) => format!("reconstructed {} samples, relative L2 {e:.4e}", truth.len()),
                None => format!("reconstructed {} samples", truth.len()),
            });
        }
        Command::Info { points, delta, eta } => {
            let rep = InfoContentReport::compute(*points, g.resolution, *delta, *eta)?;
            ctx.emit(&rep, || {
                format!(
                    "N={} r={} delta={} eta={}\n  raw       {:>10.1} bits\n  binary    {:>10.1} bits ({:.2}%)\n  count     {:>10.1} bits ({:.2}%)\n  footprint {:>10.1} bits ({:.2}%)",
                    rep.n,
                    rep.resolution,
                    rep.delta,
                    rep.eta,
                    rep.raw,
                    rep.binary,
                    100.0 * rep.retention_binary,
                    rep.count,
                    100.0 * rep.retention_count,
                    rep.proposed,
                    100.0 * rep.retention_proposed
                )
            });
        }
        Command::Convergence { field, resolutions, points_per_cell, eval_points } => {
            let case = parse_field(field)?;
            let cfg = ConvergenceConfig {
                dim: Dim::new(g.dim)?,
                resolutions: resolutions.clone(),
                points_per_cell: *points_per_cell,
                eval_points: *eval_points,
                seed: g.seed,
            };
            let rep = run_convergence(&case, &cfg)?;
            if let Some(path) = &g.output {
                std::fs::write(path, rep.to_csv()).map_err(|e| Error::io(path, e))?;
            }
            ctx.emit(&rep, || {
                let mut s = rep.to_csv();
                match rep.fit {
                    Some(f) => s.push_str(&format!(
                        "rms slope {:.3}, max slope {:.3}, expected {:.3}",
                        f.rms.slope, f.max.slope, rep.case.expected_order
                    )),
                    None => s.push_str("exact at every resolution"),
                }
                s
            });
        }
        Command::Weights { grid } => {
            let g_u = read_grid(grid)?;
            let w = edge_weights(&g_u)?;
            write_grid(ctx.output("weight map")?, w.as_grid(), ctx.opts)?;
            let rec = json!({ "command": "weights", "samples": g_u.samples(), "resolution": g_u.resolution() });
            ctx.emit(&rec, || format!("edge weights for {} samples", g_u.samples()));
        }
        Command::Recover { full, partial, response, known, count, dense, truth } => {
            let g_full = read_grid(full)?;
            let g_u = read_grid(response)?;
            let known = load_batch(known)?;
            let g_part = match partial {
                Some(p) => read_grid(p)?,
                None => encode_topology(&known.without_channels(), g_full.resolution())?,
            };
            let complement = complement_grid(&g_full, &g_part)?;
            let counts: Vec<usize> = match count {
                Some(k) => vec![*k; complement.samples()],
                None => g_full
                    .sums()
                    .iter()
                    .zip(g_part.sums())
                    .map(|(a, b)| (a[0] - b[0]).round().max(0.0) as usize)
                    .collect(),
            };
            let missing = recover_points(&complement, &counts, *dense)?;
            let recovered = combine(&known, &missing)?;
            let mut rec = json!({
                "command": "recover",
                "recovered": counts,
                "thresholds": missing.thresholds,
            });
            let mut human = format!("recovered {counts:?} points");
            if let Some(t) = truth {
                let truth = load_batch(t)?;
                let res = evaluate_recovery(&truth, recovered.clone(), missing.thresholds.clone(), &g_full, &g_u)?;
                rec["chamfer"] = json!(res.chamfer);
                rec["rel_l2"] = json!(res.rel_l2);
                human.push_str(&format!(", Chamfer {:.4e}, relative L2 {:.4e}", res.chamfer, res.rel_l2));
            }
            if let Some(path) = &g.output {
                let cloud = PointCloudBatch::from_coords(known.dim(), recovered)?;
                let values = reconstruct(&g_full, &g_u, &cloud)?;
                let out = cloud.with_channels(g_u.channels(), values)?;
                write_cloud(path, &CloudContainer::from_batch(&out), ctx.opts)?;
            }
            ctx.emit(&rec, || human);
        }
        Command::Partial { cloud, dropout } => {
            let batch = load_batch(cloud)?;
            let p = make_partial(&batch, *dropout, g.seed)?;
            write_cloud(ctx.output("partial cloud")?, &CloudContainer::from_batch(&p.known), ctx.opts)?;
            let rec = json!({ "command": "partial", "kept": p.known.point_counts(), "dropped": p.missing_counts() });
            ctx.emit(&rec, || format!("kept {:?}, dropped {:?}", p.known.point_counts(), p.missing_counts()));
        }
        Command::Synth { kind, samples, points } => {
            let kind: SynthKind = kind.parse()?;
            let batch = synth_dataset(kind, Dim::new(g.dim)?, *samples, *points, g.seed)?;
            write_cloud(ctx.output("dataset")?, &CloudContainer::from_batch(&batch), ctx.opts)?;
            let rec = json!({ "command": "synth", "samples": samples, "points": points });
            ctx.emit(&rec, || format!("wrote {samples} samples of {points} points"));
        }
        Command::Noise { cloud, sigma } => {
            let batch = load_batch(cloud)?;
            let noisy = add_coordinate_noise(&batch, *sigma, g.seed)?;
            write_cloud(ctx.output("noisy cloud")?, &CloudContainer::from_batch(&noisy), ctx.opts)?;
            let rec = json!({ "command": "noise", "sigma": sigma, "samples": batch.len() });
            ctx.emit(&rec, || format!("perturbed {} samples with sigma={sigma}", batch.len()));
        }
        Command::Import { csv, axes, channels, sample, rescale } => {
            let axes: Vec<&str> = axes.iter().map(String::as_str).collect();
            let chans: Vec<&str> = channels.iter().map(String::as_str).collect();
            let mut schema = CsvSchema::new(&axes, &chans);
            if let Some(s) = sample {
                schema = schema.with_sample_column(s);
            }
            let cloud = import_csv(csv, &schema, parse_rescale(rescale)?)?;
            write_cloud(ctx.output("cloud")?, &cloud, ctx.opts)?;
            let rec = json!({
                "command": "import",
                "points": cloud.point_counts(),
                "raw_range": cloud.raw_range,
                "rescale": cloud.rescale,
            });
            ctx.emit(&rec, || {
                format!(
                    "imported {} samples{}",
                    cloud.samples.len(),
                    if cloud.raw_range { " (raw range, rescale before encoding)" } else { "" }
                )
            });
        }
        Command::Bench { points, repeats, recon_points, recon_resolutions } => {
            let enc = bench_encoding(points, g.resolution, *repeats, g.seed)?;
            let rec = bench_reconstruction(*recon_points, recon_resolutions, *repeats, g.seed)?;
            let record = json!({ "command": "bench", "encoding": enc, "reconstruction": rec });
            ctx.emit(&record, || {
                let mut s = String::from("N,median_seconds\n");
                for (n, t) in enc.points.iter().zip(&enc.median_secs) {
                    s.push_str(&format!("{n},{t:.6e}\n"));
                }
                s.push_str(&format!("encoding exponent {:.3}\nr,median_seconds\n", enc.exponent.slope));
                for (r, t) in rec.resolutions.iter().zip(&rec.median_secs) {
                    s.push_str(&format!("{r},{t:.6e}\n"));
                }
                s.push_str(&format!(
                    "r^2 coefficient {:.3e} s (t = {:.1})",
                    rec.r2_fit.slope,
                    rec.r2_fit.t_statistic()
                ));
                s
            });
        }
    }
    Ok(())
}
