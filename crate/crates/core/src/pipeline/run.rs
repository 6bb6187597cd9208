use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::artifact::{
    metal_artifact_image, predict_streaks, validate_prediction, ArtifactDecomposition, ExclusionMask, PredictionMode,
    StreakReport, StreakScorer, ValidationParams,
};
use crate::error::{Error, Result};
use crate::geometry::{Phantom, StreakLine};
use crate::grid::{ImageGrid, RasterImage, Sinogram, SinogramGrid};
use crate::io;
use crate::mar::{mar_linear, mar_poisson, metal_trace};
use crate::pipeline::config::{Physics, PipelineConfig, SpikeSpec};
use crate::radon::{fbp, radon_metal, radon_phantom};
use crate::spectral::{
    monochromatic_project, noisy_project, polychromatic_project, polychromatic_project_general, scatter_project,
    NoiseSpikes, ScatterModel, Spectrum,
};

pub const TOOL_VERSION: &str = concat!("ctstreak ", env!("CARGO_PKG_VERSION"));

/// Measured projection data and what produced it.
#[derive(Debug, Clone)]
pub struct Projection {
    pub sinogram: Sinogram,
    /// `R f_E0`, the data a linear, noise-free scanner would record.
    pub reference: Sinogram,
    pub spikes: Option<NoiseSpikes>,
}

impl PipelineConfig {
    pub fn sinogram_grid(&self) -> Result<SinogramGrid> {
        SinogramGrid::new(self.n_phi, self.n_s, self.s_max)
    }

    pub fn image_grid(&self) -> Result<ImageGrid> {
        ImageGrid::new(self.n, self.fov)
    }

    pub fn prediction_mode(&self) -> PredictionMode {
        match self.physics {
            Physics::Monochromatic | Physics::Polychromatic { .. } => PredictionMode::BeamHardening,
            Physics::Scatter { .. } => PredictionMode::Scatter,
            Physics::Noise(_) => PredictionMode::Noise,
        }
    }

    pub fn validation_params(&self) -> ValidationParams {
        ValidationParams {
            n_controls: self.n_controls,
            seed: self.seed,
            theta: self.theta,
            ..ValidationParams::default()
        }
    }

    pub fn spectrum(&self) -> Option<Result<Spectrum>> {
        match self.physics {
            Physics::Polychromatic { e0, delta, bins: 0 } => Some(Spectrum::uniform(e0, delta)),
            Physics::Polychromatic { e0, delta, bins } => Some(Spectrum::uniform_bins(e0, delta, bins)),
            _ => None,
        }
    }
}

/// Simulates the measured sinogram for the configured physics.
pub fn project(cfg: &PipelineConfig, phantom: &Phantom) -> Result<Projection> {
    let grid = cfg.sinogram_grid()?;
    let reference = radon_phantom(phantom, grid)?;
    let mut spikes = None;
    let sinogram = match &cfg.physics {
        Physics::Monochromatic => monochromatic_project(phantom, grid)?,
        Physics::Polychromatic { bins: 0, .. } => {
            polychromatic_project(phantom, &cfg.spectrum().expect("polychromatic")?, grid)?
        }
        Physics::Polychromatic { .. } => {
            polychromatic_project_general(phantom, &cfg.spectrum().expect("polychromatic")?, grid)?
        }
        Physics::Scatter { c } => scatter_project(phantom, &ScatterModel::new(*c)?, grid)?,
        Physics::Noise(spec) => {
            let s = match spec {
                SpikeSpec::File(f) => NoiseSpikes::new(io::spikes_from_csv(&fs::read_to_string(cfg.resolve(f))?)?)?,
                SpikeSpec::Random(law) => NoiseSpikes::generate(grid, *law, cfg.seed)?,
            };
            let p = noisy_project(phantom, &s, grid)?;
            spikes = Some(s);
            p
        }
    };
    Ok(Projection {
        sinogram,
        reference,
        spikes,
    })
}

/// Scores `predicted` on `image` with the configured detection settings.
pub fn score_image(
    cfg: &PipelineConfig,
    phantom: &Phantom,
    image: &RasterImage,
    predicted: &[StreakLine],
) -> Result<StreakReport> {
    let scorer = StreakScorer::new(image, ExclusionMask::standard(phantom, image.grid), cfg.sigma);
    validate_prediction(&scorer, predicted, cfg.validation_params())
}

/// Collects output files under `<name>.partial` and renames them all once
/// the run has finished, so an aborted run never leaves a complete-looking
/// file behind.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let manifest = dir.join("manifest.txt");
        if manifest.exists() {
            fs::remove_file(manifest)?;
        }
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(format!("{name}.partial")), bytes)?;
        self.files.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
        Ok(())
    }

    fn image(&mut self, stem: &str, img: &RasterImage, window: (f64, f64), pgm: bool) -> Result<()> {
        self.put(&format!("{stem}.raw"), &io::image_to_raw(img))?;
        if pgm {
            self.put(&format!("{stem}.pgm"), &io::image_to_pgm(img, window))?;
            self.put(&format!("{stem}.pgm.window"), io::window_sidecar(window).as_bytes())?;
        }
        Ok(())
    }

    fn sinogram(&mut self, stem: &str, s: &Sinogram) -> Result<()> {
        self.put(&format!("{stem}.raw"), &io::sinogram_to_raw(s))?;
        self.put(&format!("{stem}.csv"), io::sinogram_to_csv(s).as_bytes())
    }

    fn report(&mut self, stem: &str, r: &StreakReport) -> Result<()> {
        self.put(&format!("{stem}.csv"), r.to_csv().as_bytes())?;
        self.put(&format!("{stem}.txt"), r.summary().as_bytes())
    }

    fn finish(self, header: &str) -> Result<Vec<(String, String)>> {
        for (name, _) in &self.files {
            fs::rename(self.dir.join(format!("{name}.partial")), self.dir.join(name))?;
        }
        let mut manifest = String::from(header);
        manifest.push_str("\n[files]\n");
        for (name, sum) in &self.files {
            let _ = writeln!(manifest, "{sum}  {name}");
        }
        fs::write(self.dir.join("manifest.txt"), manifest)?;
        Ok(self.files)
    }
}

/// Before/after streak ratios for one MAR method.
#[derive(Debug, Clone, PartialEq)]
pub struct MarOutcome {
    pub method: &'static str,
    pub before: Option<f64>,
    pub after: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub predicted: Vec<StreakLine>,
    pub report: StreakReport,
    pub artifact_report: Option<StreakReport>,
    pub mar: Vec<MarOutcome>,
    /// `max |f_CT - f_E0 - f_MA| / max |f_CT|` when `f_MA` comes from the
    /// closed form.
    pub decomposition_residual: Option<f64>,
    /// `(file name, sha256)` of every output except the manifest.
    pub files: Vec<(String, String)>,
}

/// Runs every stage and writes the outputs to `cfg.out_dir` (resolved
/// against the config's directory).
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunSummary> {
    let out_dir = cfg.resolve(&cfg.out_dir);
    let mut out = Outputs::new(&out_dir)?;
    let window = cfg.window;

    let (phantom, image_grid, sino_grid) = (|| {
        let phantom = cfg.load_phantom()?;
        Ok((phantom, cfg.image_grid()?, cfg.sinogram_grid()?))
    })()
    .map_err(|e: Error| e.in_stage("phantom"))?;
    out.image("phantom", &phantom.rasterize(image_grid, 4), window, true)?;

    let proj = project(cfg, &phantom).map_err(|e| e.in_stage("project"))?;
    out.sinogram("sinogram", &proj.sinogram)?;
    if let Some(s) = &proj.spikes {
        out.put("spikes.csv", io::spikes_to_csv(&s.spikes).as_bytes())?;
    }

    let f_ct = fbp(&proj.sinogram, image_grid);
    let f_e0 = fbp(&proj.reference, image_grid);
    let mut decomposition_residual = None;
    let f_ma = match (&cfg.physics, phantom.shared_alpha()) {
        (Physics::Polychromatic { delta, bins: 0, .. }, Some(alpha)) => {
            let metal = radon_metal(&phantom, sino_grid).map_err(|e| e.in_stage("recon"))?;
            let f_ma = metal_artifact_image(&metal, alpha * delta, image_grid).map_err(|e| e.in_stage("recon"))?;
            let d = ArtifactDecomposition::from_parts(f_ct.clone(), f_e0.clone(), f_ma);
            decomposition_residual = Some(d.max_linearity_residual);
            d.f_ma
        }
        _ => f_ct.zip_with(&f_e0, |a, b| a - b),
    };
    out.image("recon", &f_ct, window, true)?;
    out.image("recon_e0", &f_e0, window, false)?;
    out.image("fma", &f_ma, window, true)?;

    let predicted = predict_streaks(&phantom, cfg.prediction_mode(), proj.spikes.as_ref())
        .map_err(|e| e.in_stage("predict"))?;
    out.put("prediction.csv", io::candidates_to_csv(&predicted).as_bytes())?;
    let lines: Vec<_> = predicted.iter().map(|p| p.line).collect();
    out.put("overlay.pgm", &io::overlay_pgm(&f_ct, &lines, window))?;

    let report = score_image(cfg, &phantom, &f_ct, &predicted).map_err(|e| e.in_stage("score"))?;
    out.report("report", &report)?;
    let artifact_report = if matches!(cfg.physics, Physics::Monochromatic) {
        None
    } else {
        let r = score_image(cfg, &phantom, &f_ma, &predicted).map_err(|e| e.in_stage("score"))?;
        out.report("report_artifact", &r)?;
        Some(r)
    };

    let mut mar = Vec::new();
    if cfg.mar.runs_linear() || cfg.mar.runs_poisson() {
        let stage = |e: Error| e.in_stage("mar");
        let trace = if phantom.metals.is_empty() {
            return Err(Error::InvalidInput("MAR requested but the phantom has no metal".into()).in_stage("mar"));
        } else {
            metal_trace(&radon_metal(&phantom, sino_grid).map_err(stage)?, cfg.tau_m).map_err(stage)?
        };
        let mut methods: Vec<(&'static str, Sinogram)> = Vec::new();
        if cfg.mar.runs_linear() {
            methods.push(("linear", mar_linear(&proj.sinogram, &trace).map_err(stage)?));
        }
        if cfg.mar.runs_poisson() {
            methods.push(("poisson", mar_poisson(&proj.sinogram, &trace, cfg.zeta_quantile).map_err(stage)?));
        }
        for (name, corrected) in methods {
            let recon = fbp(&corrected, image_grid);
            let after = score_image(cfg, &phantom, &recon, &predicted).map_err(stage)?;
            out.sinogram(&format!("sinogram_mar_{name}"), &corrected)?;
            out.image(&format!("recon_mar_{name}"), &recon, window, true)?;
            out.report(&format!("report_mar_{name}"), &after)?;
            mar.push(MarOutcome {
                method: name,
                before: report.mean_ratio(),
                after: after.mean_ratio(),
            });
        }
        let mut text = String::from("method,mean_ratio_before,mean_ratio_after\n");
        for m in &mar {
            let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into());
            let _ = writeln!(text, "{},{},{}", m.method, f(m.before), f(m.after));
        }
        out.put("mar_summary.csv", text.as_bytes())?;
    }

    let mut header = String::new();
    let _ = writeln!(header, "tool = {TOOL_VERSION}");
    let _ = writeln!(header, "seed = {}", cfg.seed);
    let _ = writeln!(header, "predicted_lines = {}", predicted.len());
    for p in &predicted {
        let _ = writeln!(header, "line = {} {} {}", p.line.phi, p.line.s, p.source.name());
    }
    if let Some(r) = decomposition_residual {
        let _ = writeln!(header, "decomposition_residual = {r:e}");
    }
    let _ = writeln!(header, "\n[config]");
    header.push_str(&cfg.dump());
    let files = out.finish(&header).map_err(|e| e.in_stage("report"))?;

    Ok(RunSummary {
        out_dir,
        predicted,
        report,
        artifact_report,
        mar,
        decomposition_residual,
        files,
    })
}

/// Re-hashes every file listed in `dir/manifest.txt`. Returns the names of
/// files that are missing or whose checksum differs.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(dir.join("manifest.txt"))?;
    let files = text
        .split_once("\n[files]\n")
        .map(|(_, f)| f)
        .ok_or_else(|| Error::Format("manifest has no [files] section".into()))?;
    let mut bad = Vec::new();
    for line in files.lines().filter(|l| !l.trim().is_empty()) {
        let (sum, name) = line
            .split_once("  ")
            .ok_or_else(|| Error::Format(format!("bad manifest line `{line}`")))?;
        match fs::read(dir.join(name)) {
            Ok(bytes) if hex::encode(Sha256::digest(&bytes)) == sum => {}
            _ => bad.push(name.to_string()),
        }
    }
    Ok(bad)
}
