//! Run configuration: an INI-style text file with `[section]` headers and
//! `key = value` lines. `#` starts a comment. Unknown sections and keys are
//! errors, and keys that belong to a physics mode other than the selected one
//! are rejected.
//!
//! ```text
//! [phantom]
//! library = two-disks          # or: file = path/relative/to/config.phantom
//!
//! [grid]
//! n_phi = 360
//! n_s = 512
//! s_max = 1.42
//! n = 256
//! fov = 1
//!
//! [physics]
//! mode = polychromatic         # monochromatic | polychromatic | scatter | noise
//! e0 = 0.06                    # polychromatic only
//! delta = 0.02                 # polychromatic only
//! bins = 0                     # polychromatic only; 0 = closed-form uniform
//! scatter_c = 0.01             # scatter only
//! spikes_file = spikes.csv     # noise only, or the four spike_* keys
//! spike_count = 3
//! spike_lambda = 4
//! spike_gain = 5e-5
//! spike_s_limit = 0.7
//! seed = 0
//!
//! [artifact]
//! theta = 2
//! sigma = 2
//! n_controls = 200
//!
//! [mar]
//! method = both                # none | linear | poisson | both
//! tau_m = auto
//! zeta_quantile = 0.9
//!
//! [output]
//! dir = out
//! window = -0.02 0.04
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{library, read_phantom, Phantom};
use crate::io::DEFAULT_WINDOW;
use crate::mar::DEFAULT_ZETA_QUANTILE;
use crate::spectral::SpikeLaw;

#[derive(Debug, Clone, PartialEq)]
pub enum PhantomSource {
    File(PathBuf),
    Library(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpikeSpec {
    File(PathBuf),
    Random(SpikeLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Physics {
    Monochromatic,
    /// `bins == 0` selects the closed-form uniform spectrum, otherwise the
    /// spectrum is split into that many equal-weight bins.
    Polychromatic { e0: f64, delta: f64, bins: usize },
    Scatter { c: f64 },
    Noise(SpikeSpec),
}

impl Physics {
    pub fn mode_name(&self) -> &'static str {
        match self {
            Physics::Monochromatic => "monochromatic",
            Physics::Polychromatic { .. } => "polychromatic",
            Physics::Scatter { .. } => "scatter",
            Physics::Noise(_) => "noise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarMethod {
    None,
    Linear,
    Poisson,
    Both,
}

impl MarMethod {
    pub fn name(&self) -> &'static str {
        match self {
            MarMethod::None => "none",
            MarMethod::Linear => "linear",
            MarMethod::Poisson => "poisson",
            MarMethod::Both => "both",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "none" => MarMethod::None,
            "linear" => MarMethod::Linear,
            "poisson" => MarMethod::Poisson,
            "both" => MarMethod::Both,
            _ => return None,
        })
    }

    pub fn runs_linear(&self) -> bool {
        matches!(self, MarMethod::Linear | MarMethod::Both)
    }

    pub fn runs_poisson(&self) -> bool {
        matches!(self, MarMethod::Poisson | MarMethod::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub phantom: PhantomSource,
    pub n_phi: usize,
    pub n_s: usize,
    pub s_max: f64,
    pub n: usize,
    pub fov: f64,
    pub physics: Physics,
    pub seed: u64,
    pub theta: f64,
    pub sigma: f64,
    pub n_controls: usize,
    pub mar: MarMethod,
    /// `None` means half a detector spacing.
    pub tau_m: Option<f64>,
    pub zeta_quantile: f64,
    pub out_dir: PathBuf,
    pub window: (f64, f64),
    /// Directory relative paths are resolved against; not part of the dump.
    pub base_dir: PathBuf,
}

const SECTIONS: [(&str, &[&str]); 6] = [
    ("phantom", &["file", "library"]),
    ("grid", &["n_phi", "n_s", "s_max", "n", "fov"]),
    (
        "physics",
        &[
            "mode",
            "e0",
            "delta",
            "bins",
            "scatter_c",
            "spikes_file",
            "spike_count",
            "spike_lambda",
            "spike_gain",
            "spike_s_limit",
            "seed",
        ],
    ),
    ("artifact", &["theta", "sigma", "n_controls"]),
    ("mar", &["method", "tau_m", "zeta_quantile"]),
    ("output", &["dir", "window"]),
];

/// Raw `section.key -> (value, line)` table.
type Table = BTreeMap<String, (String, usize)>;

fn tokenize(text: &str) -> Result<Table> {
    let mut table = Table::new();
    let mut section: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .map(|(s, _)| *s)
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: format!("unknown section `[{name}]`"),
                    })?,
            );
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("expected `key = value`, found `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("key `{key}` appears before any [section]"),
        })?;
        let allowed = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unknown key `{key}` in [{sec}]"),
            });
        }
        let full = format!("{sec}.{key}");
        if table.contains_key(&full) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate key `{key}` in [{sec}]"),
            });
        }
        table.insert(full, (value.to_string(), line_no));
    }
    Ok(table)
}

struct Reader {
    table: Table,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.table.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("`{key}`: cannot parse `{v}`"),
            }),
        }
    }

    fn opt_num<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| Error::Parse {
                line,
                msg: format!("`{key}`: cannot parse `{v}`"),
            }),
        }
    }
}

fn field(field: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        msg: msg.into(),
    }
}

impl PipelineConfig {
    /// Parses and validates configuration text. Relative paths are resolved
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut r = Reader { table: tokenize(text)? };

        let phantom = match (r.take("phantom.file"), r.take("phantom.library")) {
            (Some((f, _)), None) => PhantomSource::File(PathBuf::from(f)),
            (None, Some((l, _))) => PhantomSource::Library(l),
            (Some(_), Some((_, line))) => {
                return Err(Error::Parse {
                    line,
                    msg: "give either `file` or `library` in [phantom], not both".into(),
                })
            }
            (None, None) => return Err(field("phantom", "missing `file` or `library` in [phantom]")),
        };

        let n_phi = r.num("grid.n_phi", 360usize)?;
        let n_s = r.num("grid.n_s", 512usize)?;
        let s_max_given: Option<f64> = r.opt_num("grid.s_max")?;
        let n = r.num("grid.n", 256usize)?;
        let fov_given: Option<f64> = r.opt_num("grid.fov")?;

        let (mode_name, mode_line) = r.take("physics.mode").unwrap_or_else(|| ("polychromatic".into(), 0));
        let mode_name = mode_name.as_str();
        let mode_keys: &[&str] = match mode_name {
            "monochromatic" => &[],
            "polychromatic" => &["e0", "delta", "bins"],
            "scatter" => &["scatter_c"],
            "noise" => &["spikes_file", "spike_count", "spike_lambda", "spike_gain", "spike_s_limit"],
            other => {
                return Err(Error::Parse {
                    line: mode_line,
                    msg: format!("unknown physics mode `{other}`"),
                })
            }
        };
        for key in ["e0", "delta", "bins", "scatter_c", "spikes_file", "spike_count", "spike_lambda", "spike_gain", "spike_s_limit"] {
            if !mode_keys.contains(&key) {
                if let Some((_, line)) = r.table.get(&format!("physics.{key}")) {
                    return Err(Error::Parse {
                        line: *line,
                        msg: format!("`{key}` does not apply to physics mode `{mode_name}` (exactly one mode per run)"),
                    });
                }
            }
        }
        let physics = match mode_name {
            "monochromatic" => Physics::Monochromatic,
            "polychromatic" => Physics::Polychromatic {
                e0: r.num("physics.e0", 0.06)?,
                delta: r.num("physics.delta", 0.02)?,
                bins: r.num("physics.bins", 0usize)?,
            },
            "scatter" => Physics::Scatter {
                c: r.num("physics.scatter_c", 0.01)?,
            },
            _ => {
                if let Some((f, line)) = r.take("physics.spikes_file") {
                    if let Some(k) = ["spike_count", "spike_lambda", "spike_gain", "spike_s_limit"]
                        .iter()
                        .find(|k| r.table.contains_key(&format!("physics.{k}")))
                    {
                        return Err(Error::Parse {
                            line,
                            msg: format!("`spikes_file` and `{k}` are mutually exclusive"),
                        });
                    }
                    Physics::Noise(SpikeSpec::File(PathBuf::from(f)))
                } else {
                    Physics::Noise(SpikeSpec::Random(SpikeLaw {
                        count: r.num("physics.spike_count", 3usize)?,
                        lambda: r.num("physics.spike_lambda", 4.0)?,
                        gain: r.num("physics.spike_gain", 5e-5)?,
                        s_limit: r.num("physics.spike_s_limit", 0.7)?,
                    }))
                }
            }
        };
        let seed = r.num("physics.seed", 0u64)?;

        let theta = r.num("artifact.theta", 2.0)?;
        let sigma = r.num("artifact.sigma", 2.0)?;
        let n_controls = r.num("artifact.n_controls", 200usize)?;

        let mar = match r.take("mar.method") {
            None => MarMethod::None,
            Some((m, line)) => MarMethod::parse(&m).ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown MAR method `{m}` (none, linear, poisson or both)"),
            })?,
        };
        let tau_m = match r.take("mar.tau_m") {
            None => None,
            Some((v, _)) if v == "auto" => None,
            Some((v, line)) => Some(v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("`tau_m`: expected a number or `auto`, found `{v}`"),
            })?),
        };
        let zeta_quantile = r.num("mar.zeta_quantile", DEFAULT_ZETA_QUANTILE)?;

        let out_dir = r.take("output.dir").map(|(d, _)| PathBuf::from(d)).unwrap_or_else(|| PathBuf::from("out"));
        let window = match r.take("output.window") {
            None => DEFAULT_WINDOW,
            Some((v, line)) => {
                let parts: Vec<&str> = v.split_whitespace().collect();
                let bad = || Error::Parse {
                    line,
                    msg: format!("`window`: expected two numbers, found `{v}`"),
                };
                if parts.len() != 2 {
                    return Err(bad());
                }
                (parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?)
            }
        };
        debug_assert!(r.table.is_empty(), "unconsumed keys {:?}", r.table.keys());

        let mut cfg = PipelineConfig {
            phantom,
            n_phi,
            n_s,
            s_max: 0.0,
            n,
            fov: 0.0,
            physics,
            seed,
            theta,
            sigma,
            n_controls,
            mar,
            tau_m,
            zeta_quantile,
            out_dir,
            window,
            base_dir: base_dir.to_path_buf(),
        };
        let fov = match fov_given {
            Some(f) => f,
            None => cfg.load_phantom()?.fov,
        };
        cfg.fov = fov;
        cfg.s_max = s_max_given.unwrap_or(1.42 * fov);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn load_phantom(&self) -> Result<Phantom> {
        match &self.phantom {
            PhantomSource::Library(name) => library::by_name(name).ok_or_else(|| {
                field(
                    "phantom.library",
                    format!("unknown library phantom `{name}` (known: {})", library::NAMES.join(", ")),
                )
            }),
            PhantomSource::File(f) => {
                let path = self.resolve(f);
                if !path.is_file() {
                    return Err(field("phantom.file", format!("{} does not exist", path.display())));
                }
                read_phantom(&path)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let phantom = self.load_phantom()?;
        if self.n_phi < 2 {
            return Err(field("grid.n_phi", "need at least 2 angles"));
        }
        if self.n_s < 3 {
            return Err(field("grid.n_s", "need at least 3 detector bins"));
        }
        if self.n < 2 {
            return Err(field("grid.n", "need at least 2 pixels per side"));
        }
        if !(self.fov > 0.0 && self.fov.is_finite()) {
            return Err(field("grid.fov", "must be positive"));
        }
        let reach = self.fov * std::f64::consts::SQRT_2;
        if !(self.s_max >= reach) {
            return Err(field(
                "grid.s_max",
                format!(
                    "s_max = {} is below fov * sqrt(2) = {reach}; every line meeting the image square must be on the detector",
                    self.s_max
                ),
            ));
        }
        if phantom.max_support_radius() > self.s_max {
            return Err(field("grid.s_max", "phantom support exceeds the detector"));
        }
        match &self.physics {
            Physics::Monochromatic => {}
            Physics::Polychromatic { e0, delta, .. } => {
                if !(e0.is_finite() && *delta > 0.0 && delta.is_finite()) {
                    return Err(field("physics.delta", "polychromatic mode needs delta > 0"));
                }
            }
            Physics::Scatter { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(field("physics.scatter_c", "must be positive"));
                }
            }
            Physics::Noise(SpikeSpec::File(f)) => {
                if !self.resolve(f).is_file() {
                    return Err(field("physics.spikes_file", format!("{} does not exist", self.resolve(f).display())));
                }
            }
            Physics::Noise(SpikeSpec::Random(law)) => {
                if law.count == 0 {
                    return Err(field("physics.spike_count", "must be at least 1"));
                }
                if !(law.lambda > 0.0 && law.gain > 0.0 && law.s_limit > 0.0) {
                    return Err(field("physics.spike_lambda", "spike lambda, gain and s_limit must be positive"));
                }
            }
        }
        if !(self.theta > 0.0) {
            return Err(field("artifact.theta", "must be positive"));
        }
        if !(self.sigma > 0.0) {
            return Err(field("artifact.sigma", "must be positive"));
        }
        if self.n_controls < 50 {
            return Err(field("artifact.n_controls", "at least 50 control lines are required"));
        }
        if self.tau_m.is_some_and(|t| !(t >= 0.0)) {
            return Err(field("mar.tau_m", "must be non-negative"));
        }
        if !(self.zeta_quantile >= 0.0 && self.zeta_quantile <= 1.0) {
            return Err(field("mar.zeta_quantile", "must lie in [0, 1]"));
        }
        if !(self.window.0 < self.window.1) {
            return Err(field("output.window", "low end must be below high end"));
        }
        Ok(())
    }

    /// Canonical text form with every field explicit.
    pub fn dump(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "[phantom]");
        match &self.phantom {
            PhantomSource::File(f) => writeln!(o, "file = {}", f.display()),
            PhantomSource::Library(l) => writeln!(o, "library = {l}"),
        }
        .ok();
        let _ = writeln!(o, "\n[grid]");
        let _ = writeln!(o, "n_phi = {}\nn_s = {}\ns_max = {}\nn = {}\nfov = {}", self.n_phi, self.n_s, self.s_max, self.n, self.fov);
        let _ = writeln!(o, "\n[physics]\nmode = {}", self.physics.mode_name());
        match &self.physics {
            Physics::Monochromatic => {}
            Physics::Polychromatic { e0, delta, bins } => {
                let _ = writeln!(o, "e0 = {e0}\ndelta = {delta}\nbins = {bins}");
            }
            Physics::Scatter { c } => {
                let _ = writeln!(o, "scatter_c = {c}");
            }
            Physics::Noise(SpikeSpec::File(f)) => {
                let _ = writeln!(o, "spikes_file = {}", f.display());
            }
            Physics::Noise(SpikeSpec::Random(l)) => {
                let _ = writeln!(
                    o,
                    "spike_count = {}\nspike_lambda = {}\nspike_gain = {}\nspike_s_limit = {}",
                    l.count, l.lambda, l.gain, l.s_limit
                );
            }
        }
        let _ = writeln!(o, "seed = {}", self.seed);
        let _ = writeln!(o, "\n[artifact]\ntheta = {}\nsigma = {}\nn_controls = {}", self.theta, self.sigma, self.n_controls);
        let tau = self.tau_m.map(|t| t.to_string()).unwrap_or_else(|| "auto".into());
        let _ = writeln!(o, "\n[mar]\nmethod = {}\ntau_m = {tau}\nzeta_quantile = {}", self.mar.name(), self.zeta_quantile);
        let _ = writeln!(o, "\n[output]\ndir = {}\nwindow = {} {}", self.out_dir.display(), self.window.0, self.window.1);
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PipelineConfig> {
        PipelineConfig::parse(text, Path::new("."))
    }

    #[test]
    fn minimal_config_fills_defaults_and_dump_round_trips() {
        let cfg = parse("[phantom]\nlibrary = two-disks\n").unwrap();
        assert_eq!(cfg.n_phi, 360);
        assert_eq!(cfg.fov, 1.0);
        assert_eq!(cfg.window, (-0.02, 0.04));
        let dump = cfg.dump();
        let again = parse(&dump).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.dump(), dump);
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let err = parse("[phantom]\nlibrary = two-disks\n[grid]\nn_phy = 10\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("n_phy"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn small_detector_is_a_validation_error() {
        let err = parse("[phantom]\nlibrary = two-disks\n[grid]\ns_max = 1.2\n").unwrap_err();
        match err {
            Error::Config { field, msg } => {
                assert_eq!(field, "grid.s_max");
                assert!(msg.contains("sqrt(2)"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn keys_of_another_mode_are_rejected() {
        let err = parse("[phantom]\nlibrary = two-disks\n[physics]\nmode = scatter\ndelta = 0.02\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
    }

    #[test]
    fn every_mode_round_trips() {
        for physics in [
            "mode = monochromatic",
            "mode = polychromatic\nbins = 11",
            "mode = scatter\nscatter_c = 0.02",
            "mode = noise\nspike_count = 2",
        ] {
            let text = format!("[phantom]\nlibrary = metal-bone\n[physics]\n{physics}\nseed = 7\n[mar]\nmethod = both\ntau_m = 0.001\n");
            let cfg = parse(&text).unwrap();
            assert_eq!(parse(&cfg.dump()).unwrap(), cfg);
        }
    }

    #[test]
    fn missing_phantom_file_is_reported() {
        let err = parse("[phantom]\nfile = /nonexistent/x.phantom\n[grid]\nfov = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "phantom.file"), "{err}");
    }
}
