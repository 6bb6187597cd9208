//! Text format for phantoms.
//!
//! ```text
//! # comments start with '#'
//! fov = 1.0
//! hull       disk    cx=0 cy=0 r=0.9 value=0.2
//! background ellipse cx=0 cy=0.1 a=0.3 b=0.2 angle=0.5 value=0.1
//! background polygon points=0,0;0.2,0;0.2,0.2 value=0.05
//! background sector  cx=0 cy=0 r=0.1 start=0 end=1.5707963 value=0.3
//! metal      disk    cx=0.3 cy=0 r=0.1 value=1 alpha=-375 label=left
//! ```
//!
//! One primitive per line: role, kind, then `key=value` pairs. Metal lines
//! with the same `label` form one region (default label `metal`). The `hull`
//! line marks the strictly convex domain `D_0` and also contributes its
//! value to the attenuation. Numbers use Rust's shortest round-trip
//! formatting, so [`format_phantom`] followed by [`parse_phantom`] is exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::phantom::{MetalRegion, Phantom};
use crate::geometry::shape::Shape;
use crate::vec2::Vec2;

pub fn read_phantom(path: &Path) -> Result<Phantom> {
    parse_phantom(&std::fs::read_to_string(path)?)
}

pub fn write_phantom(path: &Path, phantom: &Phantom) -> Result<()> {
    std::fs::write(path, format_phantom(phantom))?;
    Ok(())
}

pub fn parse_phantom(text: &str) -> Result<Phantom> {
    let mut fov = None;
    let mut phantom = Phantom::new(1.0);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if key.trim() == "fov" {
                fov = Some(parse_num(value.trim()).map_err(err)?);
                continue;
            }
        }
        let mut words = line.split_whitespace();
        let role = words.next().unwrap_or_default();
        let kind = words
            .next()
            .ok_or_else(|| err("missing primitive kind".into()))?;
        let mut keys: BTreeMap<&str, &str> = BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found `{w}`")))?;
            if keys.insert(k, v).is_some() {
                return Err(err(format!("duplicate key `{k}`")));
            }
        }
        let mut take = |k: &str| keys.remove(k);
        let shape = match kind {
            "disk" => Shape::disk(
                num(&mut take, "cx", line_no)?,
                num(&mut take, "cy", line_no)?,
                num(&mut take, "r", line_no)?,
            ),
            "ellipse" => Shape::ellipse(
                num(&mut take, "cx", line_no)?,
                num(&mut take, "cy", line_no)?,
                num(&mut take, "a", line_no)?,
                num(&mut take, "b", line_no)?,
                opt_num(&mut take, "angle", line_no)?.unwrap_or(0.0),
            ),
            "polygon" => {
                let pts = take("points").ok_or_else(|| err("polygon needs points=".into()))?;
                let mut vertices = Vec::new();
                for pair in pts.split(';').filter(|p| !p.is_empty()) {
                    let (x, y) = pair
                        .split_once(',')
                        .ok_or_else(|| err(format!("bad point `{pair}`")))?;
                    vertices.push((parse_num(x).map_err(err)?, parse_num(y).map_err(err)?));
                }
                Shape::polygon(&vertices)
            }
            "sector" => Shape::sector(
                num(&mut take, "cx", line_no)?,
                num(&mut take, "cy", line_no)?,
                num(&mut take, "r", line_no)?,
                num(&mut take, "start", line_no)?,
                num(&mut take, "end", line_no)?,
            ),
            other => return Err(err(format!("unknown primitive kind `{other}`"))),
        };
        shape.validate().map_err(|e| err(e.to_string()))?;
        let value = num(&mut take, "value", line_no)?;
        match role {
            "background" | "hull" => {
                if role == "hull" {
                    if phantom.hull.is_some() {
                        return Err(err("more than one hull".into()));
                    }
                    phantom = phantom.with_hull(shape, value);
                } else {
                    phantom = phantom.with_background(shape, value);
                }
            }
            "metal" => {
                let alpha = num(&mut take, "alpha", line_no)?;
                let label = take("label").unwrap_or("metal").to_string();
                match phantom.metals.iter().position(|m| m.label == label) {
                    Some(i) => {
                        let region = std::mem::replace(&mut phantom.metals[i], MetalRegion::new(""));
                        phantom.metals[i] = region.with(shape, value, alpha);
                    }
                    None => phantom.metals.push(MetalRegion::new(label).with(shape, value, alpha)),
                }
            }
            other => return Err(err(format!("unknown role `{other}`"))),
        }
        if let Some(k) = keys.keys().next() {
            return Err(err(format!("unknown key `{k}` for {role} {kind}")));
        }
    }
    phantom.fov = fov.ok_or(Error::Parse {
        line: 0,
        msg: "missing `fov = ...`".into(),
    })?;
    phantom.validate()?;
    Ok(phantom)
}

fn parse_num(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: `{s}`"))
    }
}

fn num<'a>(take: &mut impl FnMut(&str) -> Option<&'a str>, key: &str, line: usize) -> Result<f64> {
    opt_num(take, key, line)?.ok_or(Error::Parse {
        line,
        msg: format!("missing `{key}=`"),
    })
}

fn opt_num<'a>(take: &mut impl FnMut(&str) -> Option<&'a str>, key: &str, line: usize) -> Result<Option<f64>> {
    take(key)
        .map(|v| parse_num(v).map_err(|msg| Error::Parse { line, msg: format!("{key}: {msg}") }))
        .transpose()
}

fn shape_fields(shape: &Shape) -> String {
    match shape {
        Shape::Disk { center, radius } => format!("disk cx={} cy={} r={}", center.x, center.y, radius),
        Shape::Ellipse { center, a, b, angle } => {
            format!("ellipse cx={} cy={} a={} b={} angle={}", center.x, center.y, a, b, angle)
        }
        Shape::Polygon { vertices } => {
            let pts: Vec<String> = vertices.iter().map(|v: &Vec2| format!("{},{}", v.x, v.y)).collect();
            format!("polygon points={}", pts.join(";"))
        }
        Shape::Sector { center, radius, start, end } => format!(
            "sector cx={} cy={} r={} start={} end={}",
            center.x, center.y, radius, start, end
        ),
    }
}

pub fn format_phantom(phantom: &Phantom) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fov = {}", phantom.fov);
    for (i, p) in phantom.background.iter().enumerate() {
        let role = if Some(i) == phantom.hull { "hull" } else { "background" };
        let _ = writeln!(out, "{role} {} value={}", shape_fields(&p.shape), p.value);
    }
    for m in &phantom.metals {
        for (p, alpha) in m.primitives.iter().zip(&m.alphas) {
            let _ = writeln!(
                out,
                "metal {} value={} alpha={} label={}",
                shape_fields(&p.shape),
                p.value,
                alpha,
                m.label
            );
        }
    }
    out
}
