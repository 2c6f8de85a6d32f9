use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Linear osmosis filtering: shadow removal, mosaic light balancing and
/// scheme benchmarks.
#[derive(Debug, Parser)]
#[command(name = "osmofilt", version)]
struct Cli {
    /// Worker threads for line solves (defaults to all cores).
    #[arg(long, global = true, env = "OSMOFILT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve an image towards a reference, or remove a shadow given its mask.
    Filter(FilterArgs),
    /// Balance the brightness of the frames of a mosaic.
    Mosaic(MosaicArgs),
    /// Convert raw intensities to reflectance with an in-scene target.
    Calibrate(CalibrateArgs),
    /// Time every scheme and step size against the analytic steady state.
    Bench(BenchArgs),
    /// List the available schemes.
    Schemes,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// explicit, implicit, pr, aos, mos or amos.
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    tau: f64,
    /// Final time.
    #[arg(long = "T", value_name = "T")]
    final_time: f64,
    /// Stop early once the relative change per step drops below this.
    #[arg(long)]
    stop_tol: Option<f64>,
    /// Output image; the extension selects the format (.pgm, .ppm, .png, .pfm).
    #[arg(long)]
    out: PathBuf,
    /// Per-iteration diagnostics CSV.
    #[arg(long)]
    diag: Option<PathBuf>,
    /// Positivity lift applied to input pixels (default 1 for integer images,
    /// 1e-6 * max for float images).
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("drift").required(true).args(["reference", "mask"]))]
struct FilterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Image whose rescaled copy is the steady state.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Region image (0 = keep, max = shadow); drift is zeroed on its boundary.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[command(flatten)]
    evolve: EvolveArgs,
}

#[derive(Debug, Args)]
struct MosaicArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON array of {"id", "x0", "y0", "width", "height"} frames.
    #[arg(long)]
    layout: PathBuf,
    #[command(flatten)]
    evolve: EvolveArgs,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Mean response of the calibration target.
    #[arg(long)]
    uref: f64,
    /// Certified reflectance of the target, in (0, 1].
    #[arg(long)]
    rref: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "pr,aos,mos,amos,implicit")]
    schemes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,10,50,100,200,500,1000")]
    taus: Vec<f64>,
    #[arg(long = "T", value_name = "T", default_value_t = 5000.0)]
    final_time: f64,
    /// Reference image for the drift (default: Gaussian-smoothed input).
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Results CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not configure {n} threads: {e}");
        }
    }

    let result = match cli.command {
        Command::Filter(args) => commands::filter(args),
        Command::Mosaic(args) => commands::mosaic(args),
        Command::Calibrate(args) => commands::calibrate(args),
        Command::Bench(args) => commands::bench(args),
        Command::Schemes => commands::schemes(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
