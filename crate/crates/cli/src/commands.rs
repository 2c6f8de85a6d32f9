use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use osmofilt::bench::{default_reference, run_bench, write_bench_csv};
use osmofilt::io::{self, ImageFormat};
use osmofilt::pipeline::{balance_mosaic, calibrate_reflectance, region_perimeter, remove_shadow};
use osmofilt::{
    analytic_steady_state, drift_from_reference, evolve, registry, DiagnosticsTrace, Error, Field, PositiveImage,
    Raster, SchemeConfig,
};

use super::{BenchArgs, CalibrateArgs, EvolveArgs, FilterArgs, MosaicArgs};

/// A failed command: message for stderr and the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NonFinite { .. } | Error::ZeroPivot { .. } | Error::NotSplit(_) | Error::OracleTooLarge { .. } => 3,
            Error::Io(_)
            | Error::Decode { .. }
            | Error::UnsupportedFormat(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::InvalidImage(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult<T = ()> = std::result::Result<T, Failure>;

/// Prefixes the failure with the file it concerns.
fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

struct Planes {
    images: Vec<PositiveImage>,
    format: ImageFormat,
}

impl Planes {
    fn load(path: &Path, eps: Option<f64>) -> CmdResult<Self> {
        let (images, format) = io::load_channels(path, eps).map_err(at(path))?;
        Ok(Planes { images, format })
    }

    fn dims(&self) -> (usize, usize) {
        self.images[0].dims()
    }

    /// Output format from the extension, keeping the input's bit depth.
    fn output_format(&self, out: &Path) -> CmdResult<ImageFormat> {
        let sixteen = matches!(self.format, ImageFormat::Pnm16 | ImageFormat::Png16);
        Ok(ImageFormat::from_path(out, sixteen)?)
    }
}

fn scheme_config(args: &EvolveArgs) -> CmdResult<SchemeConfig> {
    registry().get(&args.scheme)?;
    let mut cfg = SchemeConfig::new(args.scheme.as_str(), args.tau, args.final_time);
    if let Some(tol) = args.stop_tol {
        cfg = cfg.stop_tol(tol);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn save_planes(out: &Path, format: ImageFormat, planes: &[Field]) -> CmdResult {
    let (w, h) = planes[0].dims();
    let data: Vec<&[f64]> = planes.iter().map(|p| p.data()).collect();
    let report = io::save_channels(w, h, &data, out, format).map_err(at(out))?;
    if report.clamped > 0 {
        eprintln!(
            "warning: {} samples clamped when writing {}",
            report.clamped,
            out.display()
        );
    }
    Ok(())
}

/// One trace file per channel; colour runs get `_c0`, `_c1`, ... suffixes.
fn save_traces(path: &Path, traces: &[DiagnosticsTrace]) -> CmdResult {
    if traces.len() == 1 {
        return io::save_trace(&traces[0], path).map_err(at(path));
    }
    for (c, trace) in traces.iter().enumerate() {
        let p = channel_path(path, c);
        io::save_trace(trace, &p).map_err(at(&p))?;
    }
    Ok(())
}

fn channel_path(path: &Path, channel: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_c{channel}.{}", ext.to_string_lossy()),
        None => format!("{stem}_c{channel}"),
    };
    path.with_file_name(name)
}

fn finish(args: &EvolveArgs, format: ImageFormat, results: Vec<(Field, DiagnosticsTrace)>) -> CmdResult {
    let (planes, traces): (Vec<Field>, Vec<DiagnosticsTrace>) = results.into_iter().unzip();
    for (c, trace) in traces.iter().enumerate() {
        if let Some(last) = trace.last() {
            log::info!(
                "channel {c}: {} steps to t = {}, mean {:.6}, last relative change {:.3e}",
                last.iter,
                last.t,
                last.mean,
                last.rel_change
            );
        }
    }
    save_planes(&args.out, format, &planes)?;
    if let Some(diag) = &args.diag {
        save_traces(diag, &traces)?;
    }
    Ok(())
}

pub fn filter(args: FilterArgs) -> CmdResult {
    let cfg = scheme_config(&args.evolve)?;
    let input = Planes::load(&args.input, args.evolve.eps)?;
    let format = input.output_format(&args.evolve.out)?;

    let results = if let Some(reference) = &args.reference {
        let refs = Planes::load(reference, None)?;
        if refs.dims() != input.dims() {
            return Err(at(reference)(Error::shape(input.dims(), refs.dims())));
        }
        if refs.images.len() != 1 && refs.images.len() != input.images.len() {
            return Err(Failure {
                code: 1,
                message: format!(
                    "reference has {} channels, input has {}",
                    refs.images.len(),
                    input.images.len()
                ),
            });
        }
        input
            .images
            .iter()
            .enumerate()
            .map(|(c, f)| {
                let v = &refs.images[c.min(refs.images.len() - 1)];
                let cfg = cfg.clone().reference(analytic_steady_state(f, v));
                evolve(f, &drift_from_reference(v), &cfg).map_err(Failure::from)
            })
            .collect::<CmdResult<Vec<_>>>()?
    } else {
        let mask_path = args.mask.as_deref().expect("clap requires --reference or --mask");
        let raw = io::load_raw(mask_path).map_err(at(mask_path))?;
        if raw.channels.len() != 1 {
            return Err(Failure {
                code: 1,
                message: format!("{}: mask must be single-channel", mask_path.display()),
            });
        }
        let region = raw.channel(0)?;
        if region.dims() != input.dims() {
            return Err(Error::shape(input.dims(), region.dims()).into());
        }
        let mask = region_perimeter(&region, raw.format.max_value().unwrap_or(1.0))?;
        log::info!("shadow boundary has {} edges", mask.count());
        input
            .images
            .iter()
            .map(|f| remove_shadow(f, &mask, &cfg).map_err(Failure::from))
            .collect::<CmdResult<Vec<_>>>()?
    };
    finish(&args.evolve, format, results)
}

pub fn mosaic(args: MosaicArgs) -> CmdResult {
    let cfg = scheme_config(&args.evolve)?;
    let input = Planes::load(&args.input, args.evolve.eps)?;
    let format = input.output_format(&args.evolve.out)?;
    let layout = io::load_layout(&args.layout).map_err(at(&args.layout))?;
    let results = input
        .images
        .iter()
        .map(|f| balance_mosaic(f, &layout, &cfg).map_err(Failure::from))
        .collect::<CmdResult<Vec<_>>>()?;
    finish(&args.evolve, format, results)
}

pub fn calibrate(args: CalibrateArgs) -> CmdResult {
    let raw = io::load_raw(&args.input).map_err(at(&args.input))?;
    let mut planes = Vec::with_capacity(raw.channels.len());
    let mut above_one = 0;
    for c in 0..raw.channels.len() {
        let r = calibrate_reflectance(&raw.channel(c)?, args.uref, args.rref)?;
        above_one += r.above_one;
        planes.push(r.field);
    }
    if above_one > 0 {
        eprintln!("warning: {above_one} samples have reflectance above 1");
    }
    let sixteen = matches!(raw.format, ImageFormat::Pnm16 | ImageFormat::Png16);
    let format = ImageFormat::from_path(&args.out, sixteen)?;
    save_planes(&args.out, format, &planes)
}

pub fn bench(args: BenchArgs) -> CmdResult {
    for s in &args.schemes {
        registry().get(s)?;
    }
    let f = io::load_image(&args.image, None).map_err(at(&args.image))?;
    let v = match &args.reference {
        Some(path) => io::load_image(path, None).map_err(at(path))?,
        None => default_reference(&f)?,
    };
    let rows = run_bench(&f, &v, &args.schemes, &args.taus, args.final_time)?;
    let file = File::create(&args.out).map_err(|e| at(&args.out)(e.into()))?;
    write_bench_csv(&rows, args.final_time, BufWriter::new(file)).map_err(at(&args.out))?;

    println!(
        "{:<10} {:>8} {:>7} {:>11} {:>12}  status",
        "scheme", "tau", "steps", "wall_ms", "energy_err"
    );
    for r in &rows {
        println!(
            "{:<10} {:>8} {:>7} {:>11.1} {:>12.3e}  {}",
            r.scheme, r.tau, r.steps, r.wall_ms, r.energy_error, r.status
        );
    }
    Ok(())
}

pub fn schemes() -> CmdResult {
    for s in registry().iter() {
        let aliases = s.aliases();
        if aliases.is_empty() {
            println!("{:<10} {}", s.name(), s.summary());
        } else {
            println!("{:<10} {} (also: {})", s.name(), s.summary(), aliases.join(", "));
        }
    }
    Ok(())
}
