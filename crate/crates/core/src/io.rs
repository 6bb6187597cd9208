//! File formats shared by the pipeline and the subcommands.
//!
//! * Sinograms and images as raw little-endian `f64` with a 32-byte header:
//!   an 8-byte magic, two `u64` dimensions, and an `f64` extent (`s_max` for
//!   sinograms, `fov` for images).
//! * Sinograms as CSV: a `n_phi,n_s,s_max` header line, one value line, then
//!   one line per angle.
//! * Images as 16-bit binary PGM over a display window, with the window
//!   written to a `<file>.window` sidecar.
//! * Streak lines as CSV `phi_rad,s,span_dim,source,tangency_count` and
//!   noise spikes as CSV `phi,s,c`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{Line, StreakLine, StreakSource};
use crate::grid::{ImageGrid, RasterImage, Sinogram, SinogramGrid};
use crate::spectral::Spike;

pub const SINOGRAM_MAGIC: [u8; 8] = *b"CTSSINO1";
pub const IMAGE_MAGIC: [u8; 8] = *b"CTSIMAG1";
const HEADER_LEN: usize = 32;

/// Display window used when none is configured.
pub const DEFAULT_WINDOW: (f64, f64) = (-0.02, 0.04);

fn encode_raw(magic: [u8; 8], d0: usize, d1: usize, extent: f64, data: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.len());
    out.extend_from_slice(&magic);
    out.extend_from_slice(&(d0 as u64).to_le_bytes());
    out.extend_from_slice(&(d1 as u64).to_le_bytes());
    out.extend_from_slice(&extent.to_le_bytes());
    for v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode_raw(bytes: &[u8], magic: [u8; 8]) -> Result<(usize, usize, f64, Vec<f64>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("raw file shorter than its {HEADER_LEN}-byte header")));
    }
    if bytes[..8] != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&bytes[..8]),
            String::from_utf8_lossy(&magic)
        )));
    }
    let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().expect("8-byte slice") };
    let d0 = u64::from_le_bytes(word(8)) as usize;
    let d1 = u64::from_le_bytes(word(16)) as usize;
    let extent = f64::from_le_bytes(word(24));
    let body = &bytes[HEADER_LEN..];
    let expected = d0
        .checked_mul(d1)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::Format("raw dimensions overflow".into()))?;
    if body.len() != expected {
        return Err(Error::Format(format!(
            "raw body has {} bytes, header {d0}x{d1} needs {expected}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((d0, d1, extent, data))
}

pub fn sinogram_to_raw(s: &Sinogram) -> Vec<u8> {
    encode_raw(SINOGRAM_MAGIC, s.grid.n_phi, s.grid.n_s, s.grid.s_max, &s.data)
}

pub fn sinogram_from_raw(bytes: &[u8]) -> Result<Sinogram> {
    let (n_phi, n_s, s_max, data) = decode_raw(bytes, SINOGRAM_MAGIC)?;
    Sinogram::from_data(SinogramGrid::new(n_phi, n_s, s_max)?, data)
}

pub fn image_to_raw(img: &RasterImage) -> Vec<u8> {
    encode_raw(IMAGE_MAGIC, img.grid.n, img.grid.n, img.grid.fov, &img.data)
}

pub fn image_from_raw(bytes: &[u8]) -> Result<RasterImage> {
    let (rows, cols, fov, data) = decode_raw(bytes, IMAGE_MAGIC)?;
    if rows != cols {
        return Err(Error::Format(format!("image must be square, got {rows}x{cols}")));
    }
    RasterImage::from_data(ImageGrid::new(rows, fov)?, data)
}

pub fn sinogram_to_csv(s: &Sinogram) -> String {
    let g = s.grid;
    let mut out = format!("n_phi,n_s,s_max\n{},{},{}\n", g.n_phi, g.n_s, g.s_max);
    for row in s.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {field:?}"),
    })
}

fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a non-negative integer: {field:?}"),
    })
}

pub fn sinogram_from_csv(text: &str) -> Result<Sinogram> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = lines.next().map(|(_, l)| l.trim());
    if header != Some("n_phi,n_s,s_max") {
        return Err(Error::Parse {
            line: 1,
            msg: "expected header `n_phi,n_s,s_max`".into(),
        });
    }
    let (ln, dims) = lines.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing dimensions".into(),
    })?;
    let dims: Vec<&str> = dims.split(',').collect();
    if dims.len() != 3 {
        return Err(Error::Parse {
            line: ln,
            msg: "expected three fields".into(),
        });
    }
    let grid = SinogramGrid::new(parse_usize(dims[0], ln)?, parse_usize(dims[1], ln)?, parse_f64(dims[2], ln)?)?;
    let mut data = Vec::with_capacity(grid.len());
    let mut rows = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for f in line.split(',') {
            data.push(parse_f64(f, ln)?);
        }
        if data.len() - before != grid.n_s {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {} values, found {}", grid.n_s, data.len() - before),
            });
        }
        rows += 1;
    }
    if rows != grid.n_phi {
        return Err(Error::Format(format!("expected {} angle rows, found {rows}", grid.n_phi)));
    }
    Sinogram::from_data(grid, data)
}

/// 16-bit binary PGM; `lo` maps to 0 and `hi` to 65535, clamped. Row 0 of
/// the image (largest `y`) is the top of the picture.
pub fn image_to_pgm(img: &RasterImage, window: (f64, f64)) -> Vec<u8> {
    let (lo, hi) = window;
    let n = img.grid.n;
    let mut out = format!("P5\n{n} {n}\n65535\n").into_bytes();
    for &v in &img.data {
        let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
        let level = if t.is_nan() { 0 } else { (t * 65535.0).round() as u16 };
        out.extend_from_slice(&level.to_be_bytes());
    }
    out
}

/// Reads a 16-bit PGM written by [`image_to_pgm`] back to window units.
pub fn image_from_pgm(bytes: &[u8], window: (f64, f64), fov: f64) -> Result<RasterImage> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "65535" || fields[1] != fields[2] {
        return Err(Error::Format("expected a square 16-bit P5 PGM".into()));
    }
    let n: usize = fields[1].parse().map_err(|_| Error::Format("bad PGM width".into()))?;
    let body = bytes.get(pos..).unwrap_or_default();
    if body.len() != 2 * n * n {
        return Err(Error::Format("PGM body size mismatch".into()));
    }
    let (lo, hi) = window;
    let data = body
        .chunks_exact(2)
        .map(|c| lo + (hi - lo) * f64::from(u16::from_be_bytes([c[0], c[1]])) / 65535.0)
        .collect();
    RasterImage::from_data(ImageGrid::new(n, fov)?, data)
}

pub fn window_sidecar(window: (f64, f64)) -> String {
    format!("window_lo = {}\nwindow_hi = {}\n", window.0, window.1)
}

pub fn parse_window_sidecar(text: &str) -> Result<(f64, f64)> {
    let mut lo = None;
    let mut hi = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(Error::Parse {
            line: i + 1,
            msg: "expected key = value".into(),
        })?;
        let v = parse_f64(v, i + 1)?;
        match k.trim() {
            "window_lo" => lo = Some(v),
            "window_hi" => hi = Some(v),
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::Format("window sidecar needs window_lo and window_hi".into())),
    }
}

pub fn sidecar_path(pgm: &Path) -> PathBuf {
    let mut s = pgm.as_os_str().to_owned();
    s.push(".window");
    PathBuf::from(s)
}

/// Windowed image with the given lines burned in at full white.
pub fn overlay_pgm(img: &RasterImage, lines: &[Line], window: (f64, f64)) -> Vec<u8> {
    let mut canvas = img.clone();
    let g = img.grid;
    let reach = g.fov * std::f64::consts::SQRT_2;
    let step = 0.5 * g.pitch();
    let n_steps = (2.0 * reach / step).ceil() as usize;
    for line in lines {
        for k in 0..=n_steps {
            let (r, c) = g.to_pixel(line.point_at(-reach + k as f64 * step));
            let (r, c) = (r.round(), c.round());
            if r >= 0.0 && c >= 0.0 && (r as usize) < g.n && (c as usize) < g.n {
                canvas.set(r as usize, c as usize, window.1);
            }
        }
    }
    image_to_pgm(&canvas, window)
}

pub const CANDIDATE_HEADER: &str = "phi_rad,s,span_dim,source,tangency_count";

pub fn candidates_to_csv(lines: &[StreakLine]) -> String {
    let mut out = format!("{CANDIDATE_HEADER}\n");
    for l in lines {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l.line.phi,
            l.line.s,
            l.span_dim,
            l.source.name(),
            l.tangencies.len()
        );
    }
    out
}

/// Reads streak lines back. Tangency points are not stored, so the lines
/// come back without them.
pub fn candidates_from_csv(text: &str) -> Result<Vec<StreakLine>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CANDIDATE_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header `{CANDIDATE_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Parse {
                line: ln,
                msg: "expected five fields".into(),
            });
        }
        let source = StreakSource::parse(f[3].trim()).ok_or_else(|| Error::Parse {
            line: ln,
            msg: format!("unknown source `{}`", f[3].trim()),
        })?;
        let mut sl = StreakLine::bare(Line::new(parse_f64(f[0], ln)?, parse_f64(f[1], ln)?), source);
        sl.span_dim = u8::try_from(parse_usize(f[2], ln)?).map_err(|_| Error::Parse {
            line: ln,
            msg: "span_dim out of range".into(),
        })?;
        parse_usize(f[4], ln)?;
        out.push(sl);
    }
    Ok(out)
}

pub fn spikes_to_csv(spikes: &[Spike]) -> String {
    let mut out = String::from("phi,s,c\n");
    for s in spikes {
        let _ = writeln!(out, "{},{},{}", s.phi, s.s, s.c);
    }
    out
}

pub fn spikes_from_csv(text: &str) -> Result<Vec<Spike>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "phi,s,c" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `phi,s,c`".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let ln = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(Error::Parse {
                line: ln,
                msg: "expected three fields".into(),
            });
        }
        out.push(Spike {
            phi: parse_f64(f[0], ln)?,
            s: parse_f64(f[1], ln)?,
            c: parse_f64(f[2], ln)?,
        });
    }
    Ok(out)
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    if path.extension().is_some_and(|e| e == "csv") {
        sinogram_from_csv(&fs::read_to_string(path)?)
    } else {
        sinogram_from_raw(&fs::read(path)?)
    }
}

pub fn read_image(path: &Path) -> Result<RasterImage> {
    image_from_raw(&fs::read(path)?)
}
