use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use ctstreak::artifact::{predict_streaks, validate_prediction, ExclusionMask, PredictionMode, StreakScorer, ValidationParams};
use ctstreak::geometry::{library, read_phantom, write_phantom, Phantom};
use ctstreak::io;
use ctstreak::mar::{mar_linear, mar_poisson, metal_trace, DEFAULT_ZETA_QUANTILE};
use ctstreak::pipeline::{project, run_pipeline, verify_manifest, PipelineConfig};
use ctstreak::radon::{fbp, radon_metal};
use ctstreak::spectral::NoiseSpikes;
use ctstreak::{Error, ImageGrid, Result};

// stdout writes that surface a closed pipe as an error instead of a panic
macro_rules! out {
    ($($arg:tt)*) => {
        write!(std::io::stdout(), $($arg)*)?
    };
}
macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout(), $($arg)*)?
    };
}

/// Metal streak artifacts in parallel-beam CT: simulate, reconstruct,
/// predict, measure and correct.
#[derive(Parser)]
#[command(name = "ctstreak", version)]
struct Cli {
    /// Pipeline configuration file; without a subcommand the full pipeline runs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the output directory of the configuration.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "CTSTREAK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PhantomArg {
    /// Phantom description file.
    #[arg(long)]
    phantom: Option<PathBuf>,
    /// Built-in phantom: shepp-logan, shepp-logan-original, two-disks, single-disk, quarter-disk, metal-bone.
    #[arg(long)]
    library: Option<String>,
}

impl PhantomArg {
    fn load(&self) -> Result<Phantom> {
        match (&self.phantom, &self.library) {
            (Some(p), _) => read_phantom(p),
            (_, Some(name)) => library::by_name(name).ok_or_else(|| {
                Error::InvalidInput(format!("unknown library phantom `{name}` (known: {})", library::NAMES.join(", ")))
            }),
            _ => unreachable!("clap requires one of --phantom and --library"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    BeamHardening,
    Scatter,
    Noise,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Linear,
    Poisson,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage from a configuration file (needs --config).
    Run,
    /// Rasterize a phantom to a raw image and optionally a windowed PGM.
    PhantomRender {
        #[command(flatten)]
        phantom: PhantomArg,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Image half-width; defaults to the phantom's field of view.
        #[arg(long)]
        fov: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pgm: Option<PathBuf>,
        #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [io::DEFAULT_WINDOW.0, io::DEFAULT_WINDOW.1])]
        window: Vec<f64>,
        /// Also write the phantom description to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Simulate the measured sinogram for the configuration's physics (needs --config).
    Project {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Where to write the spike list in noise mode.
        #[arg(long)]
        spikes_out: Option<PathBuf>,
    },
    /// Filtered backprojection of a sinogram file.
    Recon {
        #[arg(long)]
        sinogram: PathBuf,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        fov: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pgm: Option<PathBuf>,
        #[arg(long, num_args = 2, allow_negative_numbers = true, default_values_t = [io::DEFAULT_WINDOW.0, io::DEFAULT_WINDOW.1])]
        window: Vec<f64>,
    },
    /// Print (and optionally save) the predicted streak lines.
    Predict {
        #[command(flatten)]
        phantom: PhantomArg,
        #[arg(long, value_enum, default_value = "beam-hardening")]
        mode: Mode,
        /// Spike list (phi,s,c CSV), required in noise mode.
        #[arg(long)]
        spikes: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predicted lines against random control lines in an image.
    Score {
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        phantom: PhantomArg,
        #[arg(long)]
        prediction: PathBuf,
        /// Number of random control lines; at least 50.
        #[arg(long, default_value_t = 200, value_parser = parse_n_controls)]
        n_controls: usize,
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        #[arg(long, default_value_t = 2.0)]
        sigma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete the metal trace of a sinogram.
    Mar {
        #[arg(long)]
        sinogram: PathBuf,
        #[command(flatten)]
        phantom: PhantomArg,
        #[arg(long, value_enum)]
        method: Method,
        /// Trace threshold on the metal projection; defaults to half a detector spacing.
        #[arg(long)]
        tau_m: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ZETA_QUANTILE)]
        zeta_quantile: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a run directory against its manifest and print its reports.
    Report {
        #[arg(long)]
        run_dir: PathBuf,
    },
}

fn parse_n_controls(v: &str) -> std::result::Result<usize, String> {
    let n: usize = v.parse().map_err(|e| format!("{e}"))?;
    if n < 50 {
        return Err(format!("at least 50 control lines are required, got {n}"));
    }
    Ok(n)
}

/// Prints a parse error followed by the usage of the subcommand it concerns.
fn usage_error(e: clap::Error) -> ExitCode {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        e.exit();
    }
    let _ = e.print();
    if e.render().to_string().contains("Usage:") {
        return ExitCode::from(2);
    }
    let mut cmd = Cli::command();
    cmd.build();
    let sub = std::env::args()
        .skip(1)
        .find_map(|a| cmd.get_subcommands().find(|s| s.get_name() == a).map(|s| s.get_name().to_string()));
    let usage = match sub.and_then(|name| cmd.find_subcommand_mut(&name).map(|s| s.render_usage())) {
        Some(u) => u,
        None => cmd.render_usage(),
    };
    eprintln!("\n{usage}");
    ExitCode::from(2)
}

fn write_sinogram(path: &Path, s: &ctstreak::Sinogram) -> Result<()> {
    if path.extension().is_some_and(|e| e == "csv") {
        fs::write(path, io::sinogram_to_csv(s))?;
    } else {
        fs::write(path, io::sinogram_to_raw(s))?;
    }
    Ok(())
}

fn write_pgm(path: &Path, img: &ctstreak::RasterImage, window: &[f64]) -> Result<()> {
    let w = (window[0], window[1]);
    fs::write(path, io::image_to_pgm(img, w))?;
    fs::write(io::sidecar_path(path), io::window_sidecar(w))?;
    Ok(())
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this command needs --config <file>".into()))?;
    let mut cfg = PipelineConfig::from_file(path)?;
    if let Some(dir) = &cli.out_dir {
        cfg.out_dir = std::path::absolute(dir)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    match cli.command.as_ref().unwrap_or(&Command::Run) {
        Command::Run => {
            let cfg = load_config(cli)?;
            let summary = run_pipeline(&cfg)?;
            out!("{}", summary.report.summary());
            for m in &summary.mar {
                let f = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "undefined".into());
                outln!("MAR {}: mean ratio {} -> {}", m.method, f(m.before), f(m.after));
            }
            outln!("wrote {} files to {}", summary.files.len() + 1, summary.out_dir.display());
        }
        Command::PhantomRender {
            phantom,
            n,
            fov,
            out,
            pgm,
            window,
            export,
        } => {
            let ph = phantom.load()?;
            let img = ph.rasterize(ImageGrid::new(*n, fov.unwrap_or(ph.fov))?, 4);
            fs::write(out, io::image_to_raw(&img))?;
            if let Some(p) = pgm {
                write_pgm(p, &img, window)?;
            }
            if let Some(e) = export {
                write_phantom(e, &ph)?;
            }
        }
        Command::Project { out, csv, spikes_out } => {
            let cfg = load_config(cli)?;
            let proj = project(&cfg, &cfg.load_phantom()?)?;
            write_sinogram(out, &proj.sinogram)?;
            if let Some(c) = csv {
                fs::write(c, io::sinogram_to_csv(&proj.sinogram))?;
            }
            if let (Some(path), Some(s)) = (spikes_out, &proj.spikes) {
                fs::write(path, io::spikes_to_csv(&s.spikes))?;
            }
        }
        Command::Recon {
            sinogram,
            n,
            fov,
            out,
            pgm,
            window,
        } => {
            let img = fbp(&io::read_sinogram(sinogram)?, ImageGrid::new(*n, *fov)?);
            fs::write(out, io::image_to_raw(&img))?;
            if let Some(p) = pgm {
                write_pgm(p, &img, window)?;
            }
        }
        Command::Predict {
            phantom,
            mode,
            spikes,
            out,
        } => {
            let ph = phantom.load()?;
            let spikes = match spikes {
                Some(p) => Some(NoiseSpikes::new(io::spikes_from_csv(&fs::read_to_string(p)?)?)?),
                None => None,
            };
            let mode = match mode {
                Mode::BeamHardening => PredictionMode::BeamHardening,
                Mode::Scatter => PredictionMode::Scatter,
                Mode::Noise => PredictionMode::Noise,
            };
            let lines = predict_streaks(&ph, mode, spikes.as_ref())?;
            let csv = io::candidates_to_csv(&lines);
            out!("{csv}");
            if let Some(o) = out {
                fs::write(o, csv)?;
            }
        }
        Command::Score {
            image,
            phantom,
            prediction,
            n_controls,
            theta,
            sigma,
            out,
        } => {
            let img = io::read_image(image)?;
            let ph = phantom.load()?;
            let predicted = io::candidates_from_csv(&fs::read_to_string(prediction)?)?;
            let scorer = StreakScorer::new(&img, ExclusionMask::standard(&ph, img.grid), *sigma);
            let params = ValidationParams {
                n_controls: *n_controls,
                seed: cli.seed.unwrap_or(0),
                theta: *theta,
                ..ValidationParams::default()
            };
            let report = validate_prediction(&scorer, &predicted, params)?;
            out!("{}", report.summary());
            if let Some(o) = out {
                fs::write(o, report.to_csv())?;
            }
        }
        Command::Mar {
            sinogram,
            phantom,
            method,
            tau_m,
            zeta_quantile,
            out,
        } => {
            let p = io::read_sinogram(sinogram)?;
            let trace = metal_trace(&radon_metal(&phantom.load()?, p.grid)?, *tau_m)?;
            let corrected = match method {
                Method::Linear => mar_linear(&p, &trace)?,
                Method::Poisson => mar_poisson(&p, &trace, *zeta_quantile)?,
            };
            write_sinogram(out, &corrected)?;
        }
        Command::Report { run_dir } => {
            let bad = verify_manifest(run_dir)?;
            if !bad.is_empty() {
                return Err(Error::Format(format!("checksum mismatch for: {}", bad.join(", "))));
            }
            outln!("manifest verified");
            for name in ["report.txt", "report_artifact.txt", "report_mar_linear.txt", "report_mar_poisson.txt"] {
                if let Ok(text) = fs::read_to_string(run_dir.join(name)) {
                    outln!("== {name}\n{text}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => return usage_error(e),
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
